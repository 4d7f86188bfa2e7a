#pragma once
// Loop discretization, gauge-continuous eigenframes along parameter paths,
// and the discrete phase functionals built on them: per-level Berry phases,
// thermal Berry phases in both ancilla conventions, generalized Berry phases,
// dynamical phases, and parallel-transport / amplitude condition monitors.

#include <functional>
#include <vector>

#include "phase/linalg.hpp"
#include "phase/states.hpp"

namespace phase {

// Closed parameter loop sampled at K+1 points with R(t_K) = R(t_0).
// The final sample is snapped onto the first (closure must already hold to
// 1e-12) so that every gauge evaluated per-sample closes bitwise.
struct LoopPath {
    std::vector<Eigen::VectorXd> samples;  // size K+1, last equals first
    std::vector<double> t;                 // strictly increasing, size K+1

    Eigen::Index segments() const { return static_cast<Eigen::Index>(t.size()) - 1; }
    double duration() const { return t.back() - t.front(); }

    // Validates closure (1e-12), K >= 8, monotone t; throws Error otherwise.
    static LoopPath create(std::vector<Eigen::VectorXd> samples, std::vector<double> t);
};

// A parameter-dependent Hamiltonian. chart_basis, when supplied, must return
// a single-valued eigenvector gauge at each parameter point (columns ordered
// by ascending eigenvalue). Thermal-phase chains are evaluated in this gauge;
// without it the deterministic spectral gauge is used, whose raw accumulated
// values may carry a different (gauge-dependent) winding.
struct HamiltonianFamily {
    std::function<ComplexMatrix(const Eigen::VectorXd&)> hamiltonian;
    std::function<ComplexMatrix(const Eigen::VectorXd&)> chart_basis;
};

// Instantaneous spectral data along a loop. `vectors` holds the smoothed
// gauge (each successive same-level overlap is real positive; the per-level
// closure defect is recorded in `mismatch` instead of being forced to zero).
// `chart` holds the single-valued per-sample gauge the smoothing started
// from, which is what the thermal chains pair.
struct TransportedFrame {
    LoopPath path;
    std::vector<RealVector> energies;    // ascending, per sample
    std::vector<ComplexMatrix> vectors;  // smoothed gauge, columns per level
    std::vector<ComplexMatrix> chart;    // single-valued gauge, columns per level
    RealVector mismatch;                 // per-level closure phase, in (-pi, pi]
    double min_gap = 0.0;

    Eigen::Index dim() const { return mismatch.size(); }
    Eigen::Index segments() const { return path.segments(); }

    // Normalized e^{-beta E_n(t_k)}/Z(t_k), ordered like the basis columns.
    RealVector gibbs_weights(double beta, Eigen::Index k) const;
};

// Diagonalizes the family at every sample and smooths the eigenvector gauge
// along the path. Throws DegenerateSpectrum when any sample's spectral gap
// falls below threshold and LevelCrossing when levels cannot be followed
// continuously between neighbouring samples.
TransportedFrame build_frame(const HamiltonianFamily& family, const LoopPath& path);

// Every phase functional reports through this record. `phase` is
// `raw_accumulated` reduced into (-pi, pi]. Accumulated quantities are
// Richardson-extrapolated from the full and half-resolution chains whenever
// the segment count is even; `convergence_estimate` is the extrapolation's
// own error estimate (0 when extrapolation was not applicable).
struct PhaseResult {
    double phase = 0.0;
    double raw_accumulated = 0.0;
    double residual_max = 0.0;          // max parallel-transport residual along the chain
    double dynamical_tally = 0.0;       // energy quadrature accumulated along the path
    double convergence_estimate = 0.0;  // |theta_K - theta_{K/2}| / 3
};

// Discrete per-level Berry phase: minus the argument of the closed Wilson
// chain of same-level overlaps. The raw value accumulates the per-step
// arguments in the frame's chart gauge, so single-valued charts recover the
// full winding (e.g. -(4pi - solid angle)/2 for the lower level of a
// latitude loop), not just its mod-2pi reduction.
PhaseResult berry_phase_level(const TransportedFrame& frame, Eigen::Index n);

using UnitaryFamily = std::function<ComplexMatrix(double)>;

// Thermal Berry phase: accumulated argument of successive overlaps of the
// instantaneous thermal state chain, paired per convention. An empty
// u_tilde means the identity at all times. For constant u_tilde the
// thermal-vacuum value equals twice the Gibbs-weighted sum of the per-level
// Berry connections, while the purified-state value is identically zero
// (every overlap is a trace of a product of positive roots).
PhaseResult thermal_berry_phase_tv(const HamiltonianFamily& family, const LoopPath& path,
                                   double beta, const UnitaryFamily& u_tilde = {});
PhaseResult thermal_berry_phase_ps(const HamiltonianFamily& family, const LoopPath& path,
                                   double beta, const UnitaryFamily& u_tilde = {});

// Phase between the initial composite state and its image under the final
// composite unitary (u1 on the system, u2_tilde transposed on the ancilla).
// Computed both as arg inner_product(initial, evolved) and as the closed
// trace form in the state's convention; the two routes must agree to 1e-9
// (their gap is reported in residual_max). Throws UndefinedPhase when the
// overlap magnitude is below 1e-12.
PhaseResult generalized_berry_phase(const CompositeState& initial, const ComplexMatrix& u1_final,
                                    const ComplexMatrix& u2_tilde_final);

// Ancilla-only special case, expressed directly on the ancilla density at
// t = 0: arg Tr[rho_tilde0 U] for PURIFIED, arg Tr[rho_tilde0^T U] for
// THERMAL_VACUUM.
PhaseResult generalized_berry_phase_ancilla_only(const DensityMatrix& rho_tilde0,
                                                 const ComplexMatrix& u_tilde_final,
                                                 AncillaConvention convention);

// Argument of the thermal average of the per-level Berry phase factors,
// arg sum_n w_n(0) e^{i theta_n}. Throws UndefinedPhase on a vanishing sum.
PhaseResult interferometric_phase_thermal(const TransportedFrame& frame, double beta);

enum class DynamicalSide { SYSTEM, ANCILLA };

// Trapezoid quadrature of the Gibbs-averaged energy along the path:
// -integral for the system, +integral for the ancilla (whose transported
// copy runs backwards so that the two tallies cancel exactly).
double dynamical_phase(const TransportedFrame& frame, double beta, DynamicalSide which);

// Max central-difference estimate of |<s(t)| d/dt |s(t)>| over interior
// samples, paired under the states' own convention. Needs >= 3 samples.
double pt_residual(const std::vector<CompositeState>& states, const std::vector<double>& t);

// Weak (system-only) condition monitor: max_k |Tr[rho(t_k) dU/dt U^dag]|.
double pt_residual_system_only(const std::vector<ComplexMatrix>& rho_path,
                               const std::vector<ComplexMatrix>& u_path,
                               const std::vector<double>& t);

// Strengthened per-level condition: residual_n = max_k of
// |<n(t_k)| rho(t_k) dU/dt U^dag |n(t_k)>| in the instantaneous eigenbasis.
RealVector pt_condition_strengthened(const std::vector<ComplexMatrix>& rho_path,
                                     const std::vector<ComplexMatrix>& u_path,
                                     const std::vector<double>& t);

struct UhlmannResiduals {
    double strong = 0.0;  // max entry norm of dW/dt^dag W - W^dag dW/dt
    double weak = 0.0;    // max |Im Tr(W^dag dW/dt)|
};

// Amplitude parallel-transport condition monitors over a sampled amplitude
// path. Amplitudes must be full rank; strong = 0 implies weak = 0.
UhlmannResiduals uhlmann_condition_check(const std::vector<ComplexMatrix>& w_path,
                                         const std::vector<double>& t);

}  // namespace phase
