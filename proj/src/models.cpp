// Two-level Bloch-sphere model constructions.

#include "phase/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "phase/errors.hpp"

namespace phase {

namespace {

constexpr double kPoleGuard = 1e-6;
constexpr double kUnitTol = 1e-9;

void require_segments(int segments, const char* where) {
    if (segments < 8 || segments % 2 != 0) {
        std::ostringstream msg;
        msg << where << ": segment count must be even and >= 8, got " << segments;
        throw ConfigError(msg.str());
    }
}

void require_orientation(int orientation, const char* where) {
    if (orientation != 1 && orientation != -1) {
        throw ConfigError(std::string(where) + ": orientation must be +1 or -1");
    }
}

Eigen::Vector3d sphere_point(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
            std::cos(theta)};
}

double polar_of(const Eigen::Vector3d& p) {
    return std::acos(std::clamp(p.z(), -1.0, 1.0));
}

double azimuth_of(const Eigen::Vector3d& p) { return std::atan2(p.y(), p.x()); }

// Signed per-segment pieces of the enclosed-area integral, trapezoid in
// cos(theta) with azimuth steps wrapped to (-pi, pi]. Meridians keep their
// azimuth frozen by the chart convention, so their pieces vanish identically.
std::vector<double> area_pieces(const SphereLoop& loop) {
    std::vector<double> pieces(static_cast<std::size_t>(loop.segments()), 0.0);
    if (loop.kind == LoopKind::Meridian) {
        return pieces;
    }
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const Eigen::Vector3d& a = loop.points[k];
        const Eigen::Vector3d& b = loop.points[k + 1];
        const double dphi = mod_two_pi(azimuth_of(b) - azimuth_of(a));
        pieces[k] = (1.0 - 0.5 * (a.z() + b.z())) * dphi;
    }
    return pieces;
}

}  // namespace

SphereLoop SphereLoop::latitude(double theta0, int segments, int orientation) {
    require_segments(segments, "SphereLoop::latitude");
    require_orientation(orientation, "SphereLoop::latitude");
    if (std::abs(std::sin(theta0)) < kPoleGuard) {
        throw ConfigError("SphereLoop::latitude: loop too close to a pole");
    }
    SphereLoop loop;
    loop.kind = LoopKind::Latitude;
    loop.orientation = orientation;
    loop.points.reserve(static_cast<std::size_t>(segments) + 1);
    for (int k = 0; k <= segments; ++k) {
        const double phi = orientation * 2.0 * std::numbers::pi * k / segments;
        loop.points.push_back(sphere_point(theta0, phi));
    }
    loop.points.back() = loop.points.front();
    return loop;
}

SphereLoop SphereLoop::meridian(double phi0, int segments) {
    require_segments(segments, "SphereLoop::meridian");
    SphereLoop loop;
    loop.kind = LoopKind::Meridian;
    loop.azimuth = phi0;
    loop.points.reserve(static_cast<std::size_t>(segments) + 1);
    const int half = segments / 2;
    for (int k = 0; k <= segments; ++k) {
        const int leg = k <= half ? k : segments - k;  // pole-to-pole and back
        const double theta = std::numbers::pi * leg / half;
        loop.points.push_back(sphere_point(theta, phi0));
    }
    loop.points.back() = loop.points.front();
    return loop;
}

SphereLoop SphereLoop::great_circle(int segments, int orientation) {
    SphereLoop loop = latitude(std::numbers::pi / 2.0, segments, orientation);
    loop.kind = LoopKind::GreatCircle;
    return loop;
}

SphereLoop SphereLoop::custom(std::vector<Eigen::Vector3d> pts) {
    const int segments = static_cast<int>(pts.size()) - 1;
    require_segments(segments, "SphereLoop::custom");
    if ((pts.back() - pts.front()).norm() > kUnitTol) {
        throw ConfigError("SphereLoop::custom: sample list is not closed");
    }
    pts.back() = pts.front();
    for (auto& p : pts) {
        const double r = p.norm();
        if (std::abs(r - 1.0) > kUnitTol) {
            throw ConfigError("SphereLoop::custom: sample leaves the unit sphere");
        }
        p /= r;
        if (std::hypot(p.x(), p.y()) < kPoleGuard) {
            throw ConfigError("SphereLoop::custom: sample too close to a pole");
        }
    }
    SphereLoop loop;
    loop.kind = LoopKind::Custom;
    loop.points = std::move(pts);
    return loop;
}

LoopPath SphereLoop::path(double tau) const {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw ConfigError("SphereLoop::path: period must be positive and finite");
    }
    const int K = segments();
    std::vector<Eigen::VectorXd> samples;
    std::vector<double> times;
    samples.reserve(static_cast<std::size_t>(K) + 1);
    times.reserve(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        samples.push_back(points[static_cast<std::size_t>(k)]);
        times.push_back(tau * k / K);
    }
    return LoopPath::create(std::move(samples), std::move(times));
}

ComplexMatrix two_level_hamiltonian(const TwoLevelParams& p) {
    if (!(p.R > 0.0) || !std::isfinite(p.R)) {
        throw ConfigError("two_level_hamiltonian: level scale R must be positive");
    }
    const Eigen::Vector3d n = sphere_point(p.theta, p.phi);
    return p.R * (n.x() * pauli(1) + n.y() * pauli(2) + n.z() * pauli(3));
}

ComplexMatrix two_level_chart(double theta, double phi) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const Complex ph = std::exp(Complex(0.0, phi));
    ComplexMatrix v(2, 2);
    v(0, 0) = s;
    v(1, 0) = -c * ph;
    v(0, 1) = c;
    v(1, 1) = s * ph;
    return v;
}

ComplexMatrix u1_rotation(double theta, double phi) {
    const ComplexMatrix chart = two_level_chart(theta, phi);
    ComplexMatrix u(2, 2);
    u.col(0) = chart.col(1);
    u.col(1) = chart.col(0);
    return u;
}

HamiltonianFamily two_level_family(double R, const SphereLoop& loop) {
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw ConfigError("two_level_family: level scale R must be positive");
    }
    HamiltonianFamily family;
    family.hamiltonian = [R](const Eigen::VectorXd& x) -> ComplexMatrix {
        return R * (x(0) * pauli(1) + x(1) * pauli(2) + x(2) * pauli(3));
    };
    if (loop.kind == LoopKind::Meridian) {
        const double phi0 = loop.azimuth;
        family.chart_basis = [phi0](const Eigen::VectorXd& x) -> ComplexMatrix {
            return two_level_chart(polar_of(x), phi0);
        };
    } else {
        family.chart_basis = [](const Eigen::VectorXd& x) -> ComplexMatrix {
            return two_level_chart(polar_of(x), std::atan2(x(1), x(0)));
        };
    }
    return family;
}

double solid_angle(const SphereLoop& loop) {
    const std::vector<double> pieces = area_pieces(loop);
    double omega = 0.0;
    for (double piece : pieces) {
        omega += piece;
    }
    return omega;
}

PairOperators su2_pair_operators() {
    ComplexMatrix raise(2, 2);
    raise.setZero();
    raise(0, 1) = 1.0;
    PairOperators ops;
    ops.jp = kron(raise, pauli(1));
    ops.jm = ops.jp.adjoint();
    ops.jz = 0.5 * kron(pauli(3), pauli(0));
    return ops;
}

double thermal_mixing_angle(double beta_R) {
    if (beta_R < 0.0 || !std::isfinite(beta_R)) {
        throw ConfigError("thermal_mixing_angle: beta*R must be finite and >= 0");
    }
    const double target = std::exp(-beta_R);
    double lo = 0.0;
    double hi = 0.8;  // tan(0.8) > 1 >= target, so the root is bracketed
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (std::tan(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ComplexMatrix u_beta(const TwoLevelParams& p, double beta) {
    if (beta < 0.0 || !std::isfinite(beta)) {
        throw ConfigError("u_beta: beta must be finite and >= 0");
    }
    if (!(p.R > 0.0) || !std::isfinite(p.R)) {
        throw ConfigError("u_beta: level scale R must be positive");
    }
    const double xi = thermal_mixing_angle(beta * p.R);
    const PairOperators ops = su2_pair_operators();
    const ComplexMatrix mixer = expm(xi * (ops.jp - ops.jm));
    const ComplexMatrix frame = kron(u1_rotation(p.theta, p.phi), u1_rotation(p.theta, p.phi));
    return frame * mixer * frame.adjoint();
}

ComplexMatrix off_diagonal_phase_shifter(const SphereLoop& loop, double t) {
    if (!std::isfinite(t) || t < -1e-12 || t > 1.0 + 1e-12) {
        throw ConfigError("off_diagonal_phase_shifter: t must lie in [0, 1]");
    }
    const std::vector<double> pieces = area_pieces(loop);
    const double position = std::clamp(t, 0.0, 1.0) * static_cast<double>(pieces.size());
    const auto whole = static_cast<std::size_t>(std::min(
        std::floor(position), static_cast<double>(pieces.size() - 1)));
    double omega = 0.0;
    for (std::size_t k = 0; k < whole; ++k) {
        omega += pieces[k];
    }
    omega += (position - static_cast<double>(whole)) * pieces[whole];
    ComplexMatrix u(2, 2);
    u.setZero();
    u(0, 1) = std::exp(Complex(0.0, -omega));
    u(1, 0) = std::exp(Complex(0.0, omega));
    return u;
}

DensityMatrix off_diagonal_protocol_density(double R, double beta) {
    if (!(R > 0.0) || beta < 0.0 || !std::isfinite(beta)) {
        throw ConfigError("off_diagonal_protocol_density: need R > 0 and beta >= 0");
    }
    return density_from_matrix(0.5 * (pauli(0) - std::tanh(beta * R) * pauli(2)));
}

AdiabaticTransporters adiabatic_transporters(const TransportedFrame& frame) {
    const std::size_t count = frame.vectors.size();
    if (count < 2) {
        throw Error("adiabatic_transporters: frame has no segments");
    }
    const ComplexMatrix anchor = frame.vectors.front().adjoint();
    AdiabaticTransporters out;
    out.u1.reserve(count);
    out.u2_tilde.reserve(count);
    for (const ComplexMatrix& v : frame.vectors) {
        out.u1.push_back(v * anchor);
        out.u2_tilde.push_back(out.u1.back().adjoint());
    }
    return out;
}

}  // namespace phase
