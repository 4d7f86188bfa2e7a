// Unit tests for loop discretization, transported frames, and phase functionals.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "loop_fixtures.hpp"
#include "phase/errors.hpp"
#include "phase/linalg.hpp"
#include "phase/models.hpp"
#include "phase/states.hpp"
#include "phase/transport.hpp"

using phase::Complex;
using phase::ComplexMatrix;
constexpr double kPi = std::numbers::pi;

namespace {

std::vector<Eigen::VectorXd> ring_samples(int segments) {
    std::vector<Eigen::VectorXd> pts(segments + 1);
    for (int k = 0; k <= segments; ++k) {
        Eigen::VectorXd p(3);
        const double a = 2.0 * kPi * k / segments;
        p << std::cos(a), std::sin(a), 0.5;
        pts[k] = p;
    }
    pts.back() = pts.front();
    return pts;
}

std::vector<double> uniform_times(int segments, double tau = 1.0) {
    std::vector<double> t(segments + 1);
    for (int k = 0; k <= segments; ++k) t[k] = tau * k / segments;
    return t;
}

}  // namespace

TEST_CASE("LoopPath::create validates its input") {
    auto pts = ring_samples(16);
    auto t = uniform_times(16);
    CHECK_NOTHROW(phase::LoopPath::create(pts, t));

    auto open = pts;
    open.back()(0) += 1e-6;
    CHECK_THROWS_AS(phase::LoopPath::create(open, t), phase::Error);

    CHECK_THROWS_AS(phase::LoopPath::create(ring_samples(4), uniform_times(4)), phase::Error);

    auto bad_t = t;
    bad_t[3] = bad_t[2];
    CHECK_THROWS_AS(phase::LoopPath::create(pts, bad_t), phase::Error);
}

TEST_CASE("build_frame on a constant loop has zero mismatch") {
    auto loop = fixtures::constant_loop({0.6, 0.0, 0.8}, 16);
    auto frame = phase::build_frame(phase::two_level_family(1.0, loop), loop.path());
    CHECK(frame.mismatch.cwiseAbs().maxCoeff() == 0.0);
    CHECK(frame.min_gap == doctest::Approx(2.0).epsilon(1e-12));
    auto res = phase::berry_phase_level(frame, 0);
    CHECK(res.phase == 0.0);
    CHECK(res.raw_accumulated == 0.0);
}

TEST_CASE("build_frame rejects degenerate spectra") {
    auto loop = fixtures::constant_loop({0.6, 0.0, 0.8}, 16);
    phase::HamiltonianFamily flat;
    flat.hamiltonian = [](const Eigen::VectorXd&) { return ComplexMatrix::Zero(2, 2); };
    CHECK_THROWS_AS(phase::build_frame(flat, loop.path()), phase::DegenerateSpectrum);
}

TEST_CASE("latitude per-level Berry phases carry the full winding") {
    const double theta0 = kPi / 3.0;
    const double omega = 2.0 * kPi * (1.0 - std::cos(theta0));
    auto loop = phase::SphereLoop::latitude(theta0, 512);
    auto frame = phase::build_frame(phase::two_level_family(1.0, loop), loop.path());

    auto lower = phase::berry_phase_level(frame, 0);
    auto upper = phase::berry_phase_level(frame, 1);
    CHECK(std::abs(lower.raw_accumulated - (omega / 2.0 - 2.0 * kPi)) <= 1e-8);
    CHECK(std::abs(upper.raw_accumulated + omega / 2.0) <= 1e-8);
    CHECK(lower.residual_max <= 1e-3);
    CHECK(lower.convergence_estimate <= 1e-4);

    // The smoothed-gauge closure defect is the mod-reduced raw value.
    CHECK(phase::circular_distance(frame.mismatch[0], phase::mod_two_pi(lower.raw_accumulated)) <= 1e-3);
}

TEST_CASE("equator Berry phase is pi on both levels") {
    auto loop = phase::SphereLoop::great_circle(256);
    auto frame = phase::build_frame(phase::two_level_family(1.0, loop), loop.path());
    for (Eigen::Index n = 0; n < 2; ++n)
        CHECK(phase::circular_distance(phase::berry_phase_level(frame, n).phase, kPi) <= 1e-8);
}

TEST_CASE("meridian per-level Berry phases vanish") {
    auto loop = phase::SphereLoop::meridian(0.3, 256);
    auto frame = phase::build_frame(phase::two_level_family(1.0, loop), loop.path());
    for (Eigen::Index n = 0; n < 2; ++n)
        CHECK(std::abs(phase::berry_phase_level(frame, n).raw_accumulated) <= 1e-8);
}

TEST_CASE("thermal-vacuum latitude phase matches the closed form") {
    const double theta0 = kPi / 3.0, beta = 1.0;
    const double omega = 2.0 * kPi * (1.0 - std::cos(theta0));
    auto loop = phase::SphereLoop::latitude(theta0, 512);
    auto family = phase::two_level_family(1.0, loop);
    auto res = phase::thermal_berry_phase_tv(family, loop.path(), beta);
    const double lam_lower = 1.0 / (1.0 + std::exp(-2.0 * beta));
    const double want = (2.0 * lam_lower - 1.0) * omega - 4.0 * lam_lower * kPi;
    CHECK(std::abs(res.raw_accumulated - want) <= 1e-6);
    CHECK(phase::circular_distance(res.phase, phase::mod_two_pi(want)) <= 1e-6);
}

TEST_CASE("thermal-vacuum equator phase is zero at every temperature") {
    auto loop = phase::SphereLoop::great_circle(128);
    auto family = phase::two_level_family(1.0, loop);
    for (double beta : {0.0, 0.3, 1.0, 4.0}) {
        auto res = phase::thermal_berry_phase_tv(family, loop.path(), beta);
        CHECK(phase::circular_distance(res.phase, 0.0) <= 1e-8);
        // The raw chain winds once around: exactly -2 pi for any beta.
        CHECK(std::abs(res.raw_accumulated + 2.0 * kPi) <= 1e-8);
    }
}

TEST_CASE("purified latitude phase vanishes identically") {
    auto loop = phase::SphereLoop::latitude(0.9, 256);
    auto family = phase::two_level_family(1.0, loop);
    for (double beta : {0.2, 1.0, 3.0}) {
        auto res = phase::thermal_berry_phase_ps(family, loop.path(), beta);
        CHECK(std::abs(res.raw_accumulated) <= 1e-12);
    }
}

TEST_CASE("driven chains on a constant Hamiltonian accumulate energy phases") {
    auto loop = fixtures::constant_loop({std::sin(0.4) * std::cos(1.1), std::sin(0.4) * std::sin(1.1),
                                         std::cos(0.4)},
                                        512);
    auto family = phase::two_level_family(1.0, loop);
    ComplexMatrix H = family.hamiltonian(loop.path().samples.front());
    auto drive = fixtures::eigen_diag_drive(H);
    const double beta = 0.9;
    ComplexMatrix rho = phase::gibbs_density(H, beta).matrix;

    auto tv = phase::thermal_berry_phase_tv(family, loop.path(), beta, drive);
    const double mean_energy = phase::trace(ComplexMatrix(rho * H)).real();
    CHECK(std::abs(tv.raw_accumulated - mean_energy) <= 1e-8);

    auto ps = phase::thermal_berry_phase_ps(family, loop.path(), beta, drive);
    const double transposed_energy = phase::trace(ComplexMatrix(rho * H.transpose())).real();
    CHECK(std::abs(ps.raw_accumulated - transposed_energy) <= 1e-8);
}

TEST_CASE("generalized phase routes agree and reduce to the ancilla trace") {
    std::mt19937_64 rng(930);
    std::normal_distribution<double> gauss;
    ComplexMatrix A(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) A(i, j) = Complex(gauss(rng), gauss(rng));
    ComplexMatrix Hr = ComplexMatrix(0.5 * (A + A.adjoint()));
    ComplexMatrix U = phase::expm(ComplexMatrix(Complex(0.0, 1.0) * Hr));

    auto rho = phase::gibbs_density(phase::pauli(3) + 0.3 * phase::pauli(1), 0.8);
    auto s = phase::purify(rho, ComplexMatrix::Identity(2, 2));

    auto trivial = phase::generalized_berry_phase(s, ComplexMatrix::Identity(2, 2),
                                                  ComplexMatrix::Identity(2, 2));
    CHECK(std::abs(trivial.phase) <= 1e-12);

    auto sys_only = phase::generalized_berry_phase(s, U, ComplexMatrix::Identity(2, 2));
    Complex tr = phase::trace(ComplexMatrix(rho.matrix * U));
    CHECK(phase::circular_distance(sys_only.phase, std::arg(tr)) <= 1e-10);
    CHECK(sys_only.residual_max <= 1e-9);
    CHECK(sys_only.raw_accumulated == sys_only.phase);

    auto anc = phase::generalized_berry_phase_ancilla_only(rho, U, phase::AncillaConvention::PURIFIED);
    CHECK(phase::circular_distance(anc.phase, std::arg(tr)) <= 1e-10);
    auto anc_tv = phase::generalized_berry_phase_ancilla_only(rho, U,
                                                              phase::AncillaConvention::THERMAL_VACUUM);
    Complex tr_tv = phase::trace(ComplexMatrix(rho.matrix.transpose() * U));
    CHECK(phase::circular_distance(anc_tv.phase, std::arg(tr_tv)) <= 1e-10);
}

TEST_CASE("generalized phase is undefined on a vanishing overlap") {
    auto half = phase::density_from_matrix(0.5 * ComplexMatrix::Identity(2, 2));
    CHECK_THROWS_AS(phase::generalized_berry_phase_ancilla_only(half, phase::pauli(3),
                                                                phase::AncillaConvention::PURIFIED),
                    phase::UndefinedPhase);
}

TEST_CASE("dynamical phases cancel between system and ancilla") {
    auto loop = phase::SphereLoop::latitude(kPi / 3.0, 64);
    auto frame = phase::build_frame(phase::two_level_family(1.0, loop), loop.path());
    const double beta = 1.2;
    double sys = phase::dynamical_phase(frame, beta, phase::DynamicalSide::SYSTEM);
    double anc = phase::dynamical_phase(frame, beta, phase::DynamicalSide::ANCILLA);
    CHECK(sys + anc == 0.0);

    auto cloop = fixtures::constant_loop({0.6, 0.0, 0.8}, 16);
    auto cframe = phase::build_frame(phase::two_level_family(1.0, cloop), cloop.path());
    double want = std::tanh(beta);  // -integral of the Gibbs mean of (+/-1) energies
    CHECK(std::abs(phase::dynamical_phase(cframe, beta, phase::DynamicalSide::SYSTEM) - want) <= 1e-12);
}

TEST_CASE("dual-transported chains satisfy the transport condition") {
    const double beta = 0.8;
    auto loop = phase::SphereLoop::latitude(kPi / 3.0, 128);
    auto path = loop.path();
    auto frame = phase::build_frame(phase::two_level_family(1.0, loop), path);
    auto trans = phase::adiabatic_transporters(frame);
    ComplexMatrix H0 = phase::two_level_family(1.0, loop).hamiltonian(path.samples.front());

    for (auto conv : {phase::AncillaConvention::PURIFIED, phase::AncillaConvention::THERMAL_VACUUM}) {
        phase::CompositeState s0 =
            conv == phase::AncillaConvention::PURIFIED
                ? phase::purify(phase::gibbs_density(H0, beta), ComplexMatrix::Identity(2, 2))
                : phase::thermal_vacuum(H0, beta, ComplexMatrix::Identity(2, 2));
        std::vector<phase::CompositeState> chain;
        chain.reserve(trans.u1.size());
        for (std::size_t k = 0; k < trans.u1.size(); ++k)
            chain.push_back(phase::apply_composite(s0, trans.u1[k], trans.u2_tilde[k]));
        CHECK(phase::pt_residual(chain, path.t) <= 1e-10);
    }
}

TEST_CASE("transport residual decays quadratically on a nonuniform loop") {
    const double beta = 0.8;
    auto residual_at = [&](int segments) {
        auto loop = fixtures::fourier_loop(7, segments);
        auto path = loop.path();
        auto frame = phase::build_frame(phase::two_level_family(1.0, loop), path);
        auto trans = phase::adiabatic_transporters(frame);
        ComplexMatrix H0 = phase::two_level_family(1.0, loop).hamiltonian(path.samples.front());
        auto s0 = phase::thermal_vacuum(H0, beta, ComplexMatrix::Identity(2, 2));
        std::vector<phase::CompositeState> chain;
        for (std::size_t k = 0; k < trans.u1.size(); ++k)
            chain.push_back(phase::apply_composite(s0, trans.u1[k], trans.u2_tilde[k]));
        return phase::pt_residual(chain, path.t);
    };
    double coarse = residual_at(64);
    double fine = residual_at(256);
    CHECK(coarse > 1e-3);          // the monitor sees a real signal here
    CHECK(fine < coarse / 8.0);    // and it decays at second order
}

TEST_CASE("system-only transport monitor matches a diagonal-drive oracle") {
    const int K = 64;
    const double alpha = 0.7;
    auto t = uniform_times(K);
    std::vector<ComplexMatrix> u_path(K + 1);
    for (int k = 0; k <= K; ++k) {
        ComplexMatrix u = ComplexMatrix::Zero(2, 2);
        u(0, 0) = std::polar(1.0, alpha * t[k]);
        u(1, 1) = std::polar(1.0, -alpha * t[k]);
        u_path[k] = u;
    }

    std::vector<ComplexMatrix> flat(K + 1, ComplexMatrix(0.5 * ComplexMatrix::Identity(2, 2)));
    CHECK(phase::pt_residual_system_only(flat, u_path, t) <= 1e-14);

    const double beta = 1.1;
    ComplexMatrix rho = phase::gibbs_density(phase::pauli(3), beta).matrix;
    std::vector<ComplexMatrix> gibbs(K + 1, rho);
    const double h = 1.0 / K;
    const double want = std::tanh(beta) * std::sin(alpha * h) / h;  // |w0 - w1| sin(alpha h)/h
    CHECK(std::abs(phase::pt_residual_system_only(gibbs, u_path, t) - want) <= 1e-10);

    // rho's ascending eigenbasis puts the light level (weight 1 - w) first.
    auto per_level = phase::pt_condition_strengthened(gibbs, u_path, t);
    const double w = 1.0 / (1.0 + std::exp(-2.0 * beta));
    CHECK(std::abs(per_level[0] - (1.0 - w) * std::sin(alpha * h) / h) <= 1e-10);
    CHECK(std::abs(per_level[1] - w * std::sin(alpha * h) / h) <= 1e-10);
}

TEST_CASE("amplitude condition monitors") {
    const int K = 200;
    auto t = uniform_times(K);
    ComplexMatrix root = phase::sqrt_psd(phase::gibbs_density(phase::pauli(3), 1.0).matrix);

    std::vector<ComplexMatrix> still(K + 1, root);
    auto r0 = phase::uhlmann_condition_check(still, t);
    CHECK(r0.strong == 0.0);
    CHECK(r0.weak == 0.0);

    const double omega = 0.5;
    std::vector<ComplexMatrix> spun(K + 1);
    for (int k = 0; k <= K; ++k) spun[k] = std::polar(1.0, omega * t[k]) * root;
    auto r1 = phase::uhlmann_condition_check(spun, t);
    CHECK(std::abs(r1.weak - omega) <= 1e-5);
    CHECK(r1.strong > 0.1);
}

TEST_CASE("interferometric phase matches the two-level average") {
    const double theta0 = kPi / 3.0, beta = 0.9;
    const double omega = 2.0 * kPi * (1.0 - std::cos(theta0));
    auto loop = phase::SphereLoop::latitude(theta0, 512);
    auto frame = phase::build_frame(phase::two_level_family(1.0, loop), loop.path());
    auto res = phase::interferometric_phase_thermal(frame, beta);
    auto w = frame.gibbs_weights(beta, 0);
    Complex want = w[0] * std::polar(1.0, omega / 2.0 - 2.0 * kPi) +
                   w[1] * std::polar(1.0, -omega / 2.0);
    CHECK(phase::circular_distance(res.phase, std::arg(want)) <= 1e-8);

    auto mloop = phase::SphereLoop::meridian(0.0, 256);
    auto mframe = phase::build_frame(phase::two_level_family(1.0, mloop), mloop.path());
    CHECK(phase::circular_distance(phase::interferometric_phase_thermal(mframe, beta).phase, 0.0) <= 1e-8);
}
