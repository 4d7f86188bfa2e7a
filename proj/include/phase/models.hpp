#pragma once
// Two-level model on the Bloch sphere: Hamiltonian family, closed loops,
// solid angles, and the unitary constructions driving the phase comparisons.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "phase/linalg.hpp"
#include "phase/states.hpp"
#include "phase/transport.hpp"

namespace phase {

// Parameters of H = R n(theta, phi) . sigma with level splitting 2R.
struct TwoLevelParams {
    double R = 1.0;
    double theta = 0.0;
    double phi = 0.0;
};

enum class LoopKind { Latitude, Meridian, GreatCircle, Custom };

// Closed sampled curve on the unit sphere. Samples include both endpoints;
// the last point is snapped onto the first so closures are exact. Loops that
// are not meridians must stay |sin theta| >= 1e-6 away from the poles, where
// the standard eigenvector gauge degenerates. Meridians run pole to pole and
// back along a fixed azimuth and use a chart built for that azimuth instead.
struct SphereLoop {
    LoopKind kind = LoopKind::Latitude;
    int orientation = +1;
    double azimuth = 0.0;  // fixed azimuth for meridians, else unused
    std::vector<Eigen::Vector3d> points;

    static SphereLoop latitude(double theta0, int segments, int orientation = +1);
    static SphereLoop meridian(double phi0, int segments);
    static SphereLoop great_circle(int segments, int orientation = +1);
    static SphereLoop custom(std::vector<Eigen::Vector3d> pts);

    int segments() const { return static_cast<int>(points.size()) - 1; }

    // Uniform time parameterization over [0, tau].
    LoopPath path(double tau = 1.0) const;
};

// H = R n . sigma. Eigenvalues are exactly -R and +R.
ComplexMatrix two_level_hamiltonian(const TwoLevelParams& p);

// Single-valued eigenvector chart at (theta, phi), ascending column order:
// column 0 spans the -R level, column 1 the +R level.
ComplexMatrix two_level_chart(double theta, double phi);

// Frame rotation with descending columns [v+ v-], so that
// H = u1 diag(R, -R) u1^dag. Used by the thermal rotation below.
ComplexMatrix u1_rotation(double theta, double phi);

// Hamiltonian family along a loop together with the loop's chart gauge.
// The family consumes the 3-vector samples of SphereLoop::path.
HamiltonianFamily two_level_family(double R, const SphereLoop& loop);

// Signed enclosed solid angle, trapezoid rule on (1 - cos theta) dphi.
double solid_angle(const SphereLoop& loop);

// su(2) ladder triple on the pair space C^2 (x) C^2.
struct PairOperators {
    ComplexMatrix jp;
    ComplexMatrix jm;
    ComplexMatrix jz;
};
PairOperators su2_pair_operators();

// Mixing angle of the thermal rotation, solved numerically so that the
// two-mode coefficient ratio matches e^{-beta R}.
double thermal_mixing_angle(double beta_R);

// 4x4 thermal rotation taking the two-mode ground state onto the dressed
// state with Gibbs coefficients.
ComplexMatrix u_beta(const TwoLevelParams& p, double beta);

// Ancilla-only operator of the off-diagonal phase-shifting protocol, sampled
// at normalized loop parameter t in [0, 1]. Anti-diagonal at every t; the
// phases grow with the partial solid angle swept by the loop, ending at
// antidiag(e^{-i Omega}, e^{+i Omega}).
ComplexMatrix off_diagonal_phase_shifter(const SphereLoop& loop, double t);

// Initial ancilla density of that protocol: (1 - tanh(beta R) sigma_2) / 2.
DensityMatrix off_diagonal_protocol_density(double R, double beta);

// Discrete adiabatic transporters along a transported frame, one matrix per
// path sample. u1 moves the system eigenframe; u2_tilde is its inverse,
// acting on the duplicate ancilla frame. At the final sample both are
// diagonal in the initial eigenbasis with conjugate phase content.
struct AdiabaticTransporters {
    std::vector<ComplexMatrix> u1;
    std::vector<ComplexMatrix> u2_tilde;
};
AdiabaticTransporters adiabatic_transporters(const TransportedFrame& frame);

}  // namespace phase
