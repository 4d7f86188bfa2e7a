// Frames along closed parameter loops and the discrete phase functionals.

#include "phase/transport.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <utility>

#include "phase/errors.hpp"

namespace phase {

namespace {

constexpr double kClosureTol = 1e-12;
constexpr double kGapRelTol = 1e-9;
constexpr double kOverlapFloor = 1e-14;
constexpr double kChartResidualTol = 1e-8;
constexpr double kRouteAgreementTol = 1e-9;
constexpr double kZeroPhaseTol = 1e-12;

double checked_arg(const Complex& z, const char* where) {
    if (std::abs(z) < kOverlapFloor) {
        throw NumericError(std::string(where) + ": overlap magnitude collapsed");
    }
    return std::arg(z);
}

struct ChainSums {
    double fine = 0.0;
    double coarse = 0.0;
    bool extrapolated = false;
};

// -sum_k arg Tr(rep_k^dag rep_{k+1}) over the full chain and, when the
// segment count is even, over the stride-2 subchain with the same endpoints.
ChainSums accumulate_chain(const std::vector<ComplexMatrix>& reps, const char* where) {
    const std::size_t K = reps.size() - 1;
    ChainSums sums;
    for (std::size_t k = 0; k < K; ++k) {
        sums.fine -= checked_arg((reps[k].adjoint() * reps[k + 1]).trace(), where);
    }
    if (K % 2 == 0 && K >= 4) {
        for (std::size_t k = 0; k + 2 <= K; k += 2) {
            sums.coarse -= checked_arg((reps[k].adjoint() * reps[k + 2]).trace(), where);
        }
        sums.extrapolated = true;
    }
    return sums;
}

PhaseResult result_from_sums(const ChainSums& sums, double residual, double tally) {
    PhaseResult r;
    if (sums.extrapolated) {
        r.raw_accumulated = sums.fine + (sums.fine - sums.coarse) / 3.0;
        r.convergence_estimate = std::abs(sums.fine - sums.coarse) / 3.0;
    } else {
        r.raw_accumulated = sums.fine;
    }
    r.phase = mod_two_pi(r.raw_accumulated);
    r.residual_max = residual;
    r.dynamical_tally = tally;
    return r;
}

double chain_residual(const std::vector<ComplexMatrix>& reps, const std::vector<double>& t) {
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < reps.size(); ++k) {
        const Complex fwd = (reps[k].adjoint() * reps[k + 1]).trace();
        const Complex bwd = (reps[k].adjoint() * reps[k - 1]).trace();
        worst = std::max(worst, std::abs((fwd - bwd) / (t[k + 1] - t[k - 1])));
    }
    return worst;
}

double average_energy(const TransportedFrame& frame, double beta, Eigen::Index k) {
    return frame.gibbs_weights(beta, k).dot(frame.energies[static_cast<std::size_t>(k)]);
}

// Trapezoid quadrature of the Gibbs-averaged energy along the path.
double energy_tally(const TransportedFrame& frame, double beta) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k + 1 <= frame.segments(); ++k) {
        const double dt = frame.path.t[static_cast<std::size_t>(k) + 1] -
                          frame.path.t[static_cast<std::size_t>(k)];
        acc += 0.5 * dt * (average_energy(frame, beta, k) + average_energy(frame, beta, k + 1));
    }
    return acc;
}

void require_unitary_sample(const ComplexMatrix& U, double t, const char* where) {
    if (unitarity_residual(U) > 1e-8) {
        std::ostringstream msg;
        msg << where << ": family value at t=" << t << " is not unitary";
        throw NumericError(msg.str());
    }
}

// Representative matrices of the instantaneous thermal chain: the gauge root
// in the frame's chart gauge for THERMAL_VACUUM, the positive root for
// PURIFIED, right-multiplied by the ancilla phase factor.
std::vector<ComplexMatrix> thermal_chain_reps(const TransportedFrame& frame, double beta,
                                              const UnitaryFamily& u_tilde,
                                              AncillaConvention convention) {
    const std::size_t n_samples = frame.chart.size();
    std::vector<ComplexMatrix> reps(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        const RealVector w = frame.gibbs_weights(beta, static_cast<Eigen::Index>(k));
        const ComplexMatrix& B = frame.chart[k];
        ComplexMatrix root;
        if (convention == AncillaConvention::THERMAL_VACUUM) {
            root = B * w.cwiseSqrt().asDiagonal() * B.transpose();
        } else {
            root = B * w.cwiseSqrt().asDiagonal() * B.adjoint();
        }
        if (u_tilde) {
            const ComplexMatrix U = u_tilde(frame.path.t[k]);
            require_unitary_sample(U, frame.path.t[k], "thermal_berry_phase");
            root *= U;
        }
        reps[k] = std::move(root);
    }
    return reps;
}

PhaseResult thermal_berry_phase(const HamiltonianFamily& family, const LoopPath& path,
                                double beta, const UnitaryFamily& u_tilde,
                                AncillaConvention convention) {
    const TransportedFrame frame = build_frame(family, path);
    const std::vector<ComplexMatrix> reps = thermal_chain_reps(frame, beta, u_tilde, convention);
    const ChainSums sums = accumulate_chain(reps, "thermal_berry_phase");
    return result_from_sums(sums, chain_residual(reps, path.t), energy_tally(frame, beta));
}

PhaseResult single_argument_result(const Complex& z, double routes_gap) {
    PhaseResult r;
    r.raw_accumulated = std::arg(z);
    r.phase = mod_two_pi(r.raw_accumulated);
    r.raw_accumulated = r.phase;
    r.residual_max = routes_gap;
    return r;
}

}  // namespace

LoopPath LoopPath::create(std::vector<Eigen::VectorXd> samples, std::vector<double> t) {
    if (samples.size() != t.size()) {
        throw Error("LoopPath: sample and t-value counts differ");
    }
    if (samples.size() < 9) {
        throw Error("LoopPath: at least 8 segments are required");
    }
    for (const auto& point : samples) {
        if (point.size() != samples.front().size()) {
            throw Error("LoopPath: parameter points have inconsistent dimension");
        }
    }
    for (std::size_t k = 1; k < t.size(); ++k) {
        if (!(t[k] > t[k - 1])) {
            throw Error("LoopPath: t-values must be strictly increasing");
        }
    }
    if ((samples.back() - samples.front()).norm() > kClosureTol) {
        throw Error("LoopPath: loop does not close at the final sample");
    }
    samples.back() = samples.front();
    LoopPath path;
    path.samples = std::move(samples);
    path.t = std::move(t);
    return path;
}

RealVector TransportedFrame::gibbs_weights(double beta, Eigen::Index k) const {
    const RealVector& E = energies.at(static_cast<std::size_t>(k));
    // Shift so the largest Boltzmann factor is exactly 1 before normalizing.
    const double pivot = beta >= 0.0 ? E.minCoeff() : E.maxCoeff();
    RealVector w = (-beta * (E.array() - pivot)).exp().matrix();
    return w / w.sum();
}

TransportedFrame build_frame(const HamiltonianFamily& family, const LoopPath& path) {
    if (!family.hamiltonian) {
        throw Error("build_frame: hamiltonian family is empty");
    }
    const std::size_t n_samples = path.t.size();
    TransportedFrame frame;
    frame.path = path;
    frame.energies.reserve(n_samples);
    frame.chart.reserve(n_samples);
    frame.min_gap = std::numeric_limits<double>::infinity();

    Eigen::Index dim = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const ComplexMatrix H = family.hamiltonian(path.samples[k]);
        if (k == 0) {
            dim = H.rows();
        } else if (H.rows() != dim || H.cols() != dim) {
            throw ShapeMismatch("build_frame: family dimension changed along the path");
        }
        const EigResult eig = eig_hermitian(H);
        const double scale = 1.0 + eig.eigenvalues.cwiseAbs().maxCoeff();
        for (Eigen::Index n = 0; n + 1 < dim; ++n) {
            const double gap = eig.eigenvalues(n + 1) - eig.eigenvalues(n);
            frame.min_gap = std::min(frame.min_gap, gap);
            if (gap < kGapRelTol * scale) {
                std::ostringstream msg;
                msg << "build_frame: levels " << n << "," << n + 1 << " degenerate at sample " << k;
                throw DegenerateSpectrum(msg.str());
            }
        }
        ComplexMatrix basis = eig.eigenvectors;
        if (family.chart_basis) {
            basis = family.chart_basis(path.samples[k]);
            if (basis.rows() != dim || basis.cols() != dim) {
                throw ShapeMismatch("build_frame: chart basis has wrong shape");
            }
            for (Eigen::Index n = 0; n < dim; ++n) {
                const double res =
                    (H * basis.col(n) - eig.eigenvalues(n) * basis.col(n)).norm();
                if (std::abs(basis.col(n).norm() - 1.0) > 1e-10 || res > kChartResidualTol * scale) {
                    std::ostringstream msg;
                    msg << "build_frame: chart column " << n
                        << " is not the ascending-order eigenvector at sample " << k;
                    throw Error(msg.str());
                }
            }
        }
        frame.energies.push_back(eig.eigenvalues);
        frame.chart.push_back(std::move(basis));
    }

    // Smooth the gauge so every successive same-level overlap is real
    // positive; the closure defect stays in `mismatch`.
    frame.vectors = frame.chart;
    for (std::size_t k = 1; k < n_samples; ++k) {
        for (Eigen::Index n = 0; n < dim; ++n) {
            const Complex o = frame.vectors[k - 1].col(n).dot(frame.chart[k].col(n));
            if (std::norm(o) < 0.5) {
                std::ostringstream msg;
                msg << "build_frame: level " << n << " cannot be followed between samples "
                    << k - 1 << " and " << k;
                throw LevelCrossing(msg.str());
            }
            frame.vectors[k].col(n) = frame.chart[k].col(n) * std::polar(1.0, -std::arg(o));
        }
    }
    frame.mismatch.resize(dim);
    for (Eigen::Index n = 0; n < dim; ++n) {
        frame.mismatch(n) =
            std::arg(frame.vectors.front().col(n).dot(frame.vectors.back().col(n)));
    }
    return frame;
}

PhaseResult berry_phase_level(const TransportedFrame& frame, Eigen::Index n) {
    if (n < 0 || n >= frame.dim()) {
        throw DimMismatch("berry_phase_level: level index out of range");
    }
    const std::size_t K = static_cast<std::size_t>(frame.segments());
    ChainSums sums;
    for (std::size_t k = 0; k < K; ++k) {
        const Complex o = frame.chart[k].col(n).dot(frame.chart[k + 1].col(n));
        if (std::norm(o) < 0.5) {
            throw LevelCrossing("berry_phase_level: chart gauge jumps between samples");
        }
        sums.fine -= std::arg(o);
    }
    if (K % 2 == 0 && K >= 4) {
        for (std::size_t k = 0; k + 2 <= K; k += 2) {
            sums.coarse -=
                checked_arg(frame.chart[k].col(n).dot(frame.chart[k + 2].col(n)), "berry_phase_level");
        }
        sums.extrapolated = true;
    }

    double residual = 0.0;
    for (std::size_t k = 1; k + 1 <= K; ++k) {
        const Complex fwd = frame.vectors[k].col(n).dot(frame.vectors[k + 1].col(n));
        const Complex bwd = frame.vectors[k].col(n).dot(frame.vectors[k - 1].col(n));
        residual = std::max(residual,
                            std::abs((fwd - bwd) / (frame.path.t[k + 1] - frame.path.t[k - 1])));
    }
    double tally = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const double dt = frame.path.t[k + 1] - frame.path.t[k];
        tally -= 0.5 * dt * (frame.energies[k](n) + frame.energies[k + 1](n));
    }
    return result_from_sums(sums, residual, tally);
}

PhaseResult thermal_berry_phase_tv(const HamiltonianFamily& family, const LoopPath& path,
                                   double beta, const UnitaryFamily& u_tilde) {
    return thermal_berry_phase(family, path, beta, u_tilde, AncillaConvention::THERMAL_VACUUM);
}

PhaseResult thermal_berry_phase_ps(const HamiltonianFamily& family, const LoopPath& path,
                                   double beta, const UnitaryFamily& u_tilde) {
    return thermal_berry_phase(family, path, beta, u_tilde, AncillaConvention::PURIFIED);
}

PhaseResult generalized_berry_phase(const CompositeState& initial, const ComplexMatrix& u1_final,
                                    const ComplexMatrix& u2_tilde_final) {
    const CompositeState evolved = apply_composite(initial, u1_final, u2_tilde_final);
    const Complex via_states = inner_product(initial, evolved);

    // Independent closed form on the state's representative matrix.
    const ComplexMatrix rep0 = initial.convention == AncillaConvention::PURIFIED
                                   ? initial.amplitude()
                                   : initial.coords();
    const Complex via_trace = (rep0.adjoint() * u1_final * rep0 * u2_tilde_final).trace();

    const double gap = std::abs(via_states - via_trace);
    if (gap > kRouteAgreementTol * (1.0 + std::abs(via_states))) {
        throw NumericError("generalized_berry_phase: pairing routes disagree");
    }
    if (std::abs(via_states) < kZeroPhaseTol) {
        throw UndefinedPhase("generalized_berry_phase: overlap magnitude below 1e-12");
    }
    return single_argument_result(via_states, gap);
}

PhaseResult generalized_berry_phase_ancilla_only(const DensityMatrix& rho_tilde0,
                                                 const ComplexMatrix& u_tilde_final,
                                                 AncillaConvention convention) {
    if (u_tilde_final.rows() != rho_tilde0.dim() || u_tilde_final.cols() != rho_tilde0.dim()) {
        throw DimMismatch("generalized_berry_phase_ancilla_only: dimension mismatch");
    }
    if (unitarity_residual(u_tilde_final) > 1e-10) {
        throw NumericError("generalized_berry_phase_ancilla_only: final operator is not unitary");
    }
    const Complex z = convention == AncillaConvention::PURIFIED
                          ? (rho_tilde0.matrix * u_tilde_final).trace()
                          : (rho_tilde0.matrix.transpose() * u_tilde_final).trace();
    if (std::abs(z) < kZeroPhaseTol) {
        throw UndefinedPhase("generalized_berry_phase_ancilla_only: trace magnitude below 1e-12");
    }
    return single_argument_result(z, 0.0);
}

PhaseResult interferometric_phase_thermal(const TransportedFrame& frame, double beta) {
    const RealVector w = frame.gibbs_weights(beta, 0);
    Complex z = 0.0;
    double residual = 0.0;
    double estimate = 0.0;
    for (Eigen::Index n = 0; n < frame.dim(); ++n) {
        // Extrapolated per-level phases rather than the frame's raw closure
        // mismatches: the averaged factor then converges at the chain rate.
        const PhaseResult level = berry_phase_level(frame, n);
        z += w(n) * std::polar(1.0, level.phase);
        residual = std::max(residual, level.residual_max);
        estimate = std::max(estimate, level.convergence_estimate);
    }
    if (std::abs(z) < kZeroPhaseTol) {
        throw UndefinedPhase("interferometric_phase_thermal: thermal average of phase factors vanishes");
    }
    PhaseResult r = single_argument_result(z, 0.0);
    r.residual_max = residual;
    r.convergence_estimate = estimate;
    return r;
}

double dynamical_phase(const TransportedFrame& frame, double beta, DynamicalSide which) {
    const double tally = energy_tally(frame, beta);
    return which == DynamicalSide::SYSTEM ? -tally : tally;
}

double pt_residual(const std::vector<CompositeState>& states, const std::vector<double>& t) {
    if (states.size() < 3) {
        throw Error("pt_residual: need at least 3 samples");
    }
    if (states.size() != t.size()) {
        throw Error("pt_residual: sample and t-value counts differ");
    }
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < states.size(); ++k) {
        const Complex fwd = inner_product(states[k], states[k + 1]);
        const Complex bwd = inner_product(states[k], states[k - 1]);
        worst = std::max(worst, std::abs((fwd - bwd) / (t[k + 1] - t[k - 1])));
    }
    return worst;
}

double pt_residual_system_only(const std::vector<ComplexMatrix>& rho_path,
                               const std::vector<ComplexMatrix>& u_path,
                               const std::vector<double>& t) {
    if (rho_path.size() < 3 || rho_path.size() != u_path.size() || rho_path.size() != t.size()) {
        throw Error("pt_residual_system_only: need matched sampling with at least 3 samples");
    }
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < u_path.size(); ++k) {
        const ComplexMatrix u_dot = (u_path[k + 1] - u_path[k - 1]) / (t[k + 1] - t[k - 1]);
        worst = std::max(worst, std::abs((rho_path[k] * u_dot * u_path[k].adjoint()).trace()));
    }
    return worst;
}

RealVector pt_condition_strengthened(const std::vector<ComplexMatrix>& rho_path,
                                     const std::vector<ComplexMatrix>& u_path,
                                     const std::vector<double>& t) {
    if (rho_path.size() < 3 || rho_path.size() != u_path.size() || rho_path.size() != t.size()) {
        throw Error("pt_condition_strengthened: need matched sampling with at least 3 samples");
    }
    const Eigen::Index dim = rho_path.front().rows();
    RealVector worst = RealVector::Zero(dim);
    for (std::size_t k = 1; k + 1 < u_path.size(); ++k) {
        const ComplexMatrix u_dot = (u_path[k + 1] - u_path[k - 1]) / (t[k + 1] - t[k - 1]);
        const ComplexMatrix gen = rho_path[k] * u_dot * u_path[k].adjoint();
        const EigResult eig = eig_hermitian(rho_path[k]);
        for (Eigen::Index n = 0; n < dim; ++n) {
            const double r = std::abs(Complex(eig.eigenvectors.col(n).dot(gen * eig.eigenvectors.col(n))));
            worst(n) = std::max(worst(n), r);
        }
    }
    return worst;
}

UhlmannResiduals uhlmann_condition_check(const std::vector<ComplexMatrix>& w_path,
                                         const std::vector<double>& t) {
    if (w_path.size() < 3 || w_path.size() != t.size()) {
        throw Error("uhlmann_condition_check: need matched sampling with at least 3 samples");
    }
    for (std::size_t k = 0; k < w_path.size(); ++k) {
        const Eigen::JacobiSVD<ComplexMatrix> svd(w_path[k]);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) < kRankTol * sv(0)) {
            throw RankDeficient("uhlmann_condition_check: amplitude loses rank along the path");
        }
    }
    UhlmannResiduals res;
    for (std::size_t k = 1; k + 1 < w_path.size(); ++k) {
        const ComplexMatrix w_dot = (w_path[k + 1] - w_path[k - 1]) / (t[k + 1] - t[k - 1]);
        const ComplexMatrix comm = w_dot.adjoint() * w_path[k] - w_path[k].adjoint() * w_dot;
        res.strong = std::max(res.strong, comm.cwiseAbs().maxCoeff());
        res.weak = std::max(res.weak, std::abs(std::imag((w_path[k].adjoint() * w_dot).trace())));
    }
    return res;
}

}  // namespace phase
