// states.hpp
// Density matrices, Gibbs states, and the two composite state-vector
// representations of a mixed state (purified state vs thermal vacuum).
//
// A composite state is kept in exact factored form: weights lambda_n, the
// eigenbasis V of the system density matrix, and the ancilla-side phase
// unitary U of the construction  sum_n sqrt(lambda_n) |n> (x) U^T |n~>,
// where |n~> duplicates the coordinates of |n>. The coordinate matrix of the
// composite vector is then M = S U with the gauge root S = V sqrt(L) V^T,
// and the amplitude is W = sqrt(rho) U. The two representations share the
// coordinate formula and differ only in which pairing their inner product
// uses: Tr[W1^dag W2] (purified, Hilbert-Schmidt of amplitudes) or the plain
// conjugated pairing Tr[M1^dag M2] (thermal vacuum).

#pragma once

#include <Eigen/Dense>

#include "phase/linalg.hpp"

namespace phase {

enum class AncillaConvention { PURIFIED, THERMAL_VACUUM };

const char* convention_name(AncillaConvention c);

struct DensityMatrix {
    ComplexMatrix matrix;
    RealVector spectrum;      // ascending, in [0, 1]
    ComplexMatrix eigenbasis; // orthonormal columns matching spectrum order

    Eigen::Index dim() const { return matrix.rows(); }
    bool is_full_rank() const { return spectrum(0) >= kRankTol; }
};

// Validates Hermiticity (1e-10), unit trace (1e-10) and positivity
// (min eigenvalue >= -1e-10), then stores the spectral data.
DensityMatrix density_from_matrix(const ComplexMatrix& rho);

// rho = exp(-beta H) / Tr exp(-beta H). The spectrum is shifted by the
// ground energy before exponentiating so large beta stays finite.
DensityMatrix gibbs_density(const ComplexMatrix& H, double beta);

struct CompositeState {
    Eigen::Index system_dim = 0;
    AncillaConvention convention = AncillaConvention::PURIFIED;
    RealVector lambdas;     // weights of the spectral construction
    ComplexMatrix basis;    // eigenvectors of the system density matrix
    ComplexMatrix phase_op; // ancilla-side unitary U

    ComplexMatrix gauge_root() const; // S = V sqrt(diag lambda) V^T
    ComplexMatrix coords() const;     // M = S U
    ComplexMatrix amplitude() const;  // W = sqrt(rho) U
    StateVector vector() const;       // vec(M), entry i*N+j = M(i,j)
    DensityMatrix system_density() const;
};

// |W> = sum_n sqrt(lambda_n) |n> (x) U^T |n~>, PURIFIED tag.
// Throws NotFullRank when rho has an eigenvalue below 1e-12, and Error when
// U is not unitary within 1e-10.
CompositeState purify(const DensityMatrix& rho, const ComplexMatrix& U);

// |0_beta> = (1/sqrt Z) sum_n e^{-beta E_n/2} |n> (x) U~^T |n~>,
// THERMAL_VACUUM tag. Same component data as purify(gibbs(H, beta), U~).
CompositeState thermal_vacuum(const ComplexMatrix& H, double beta,
                              const ComplexMatrix& U_tilde);

// Convention-dispatched inner product <a|b>. Throws ConventionMismatch when
// the tags differ and DimMismatch when the dimensions differ.
Complex inner_product(const CompositeState& a, const CompositeState& b);

// <s|(O (x) 1)|s> under the state's own convention; equals Tr(O rho) for
// both conventions. O must be Hermitian on the system factor.
double expectation(const CompositeState& s, const ComplexMatrix& O);

// Re-expresses the state under the other ancilla convention (the transposed
// pairing). The coordinate vector is unchanged; only the tag flips, which
// swaps the inner product used to pair it. Involution.
CompositeState partial_transpose_ancilla(const CompositeState& s);

// Apply 1 (x) B^T (an ancilla-only unitary B applied in transposed form,
// matching the construction's U^T slot): U -> U B.
CompositeState apply_ancilla(const CompositeState& s, const ComplexMatrix& B);

// Apply unitary A to the system and B (transposed) to the ancilla. The update
// follows each convention's own pairing geometry so that
// inner_product(s, apply_composite(s, A, B)) equals the closed trace form
// exactly:
//   THERMAL_VACUUM: plain vector action, coords M -> A M B (U -> conj(A) U B);
//   PURIFIED:       amplitude action,    W -> A W B       (U -> A U B).
// Both keep the spectrum and rotate the eigenbasis V -> A V.
CompositeState apply_composite(const CompositeState& s, const ComplexMatrix& A,
                               const ComplexMatrix& B);

// Rebuild the factored form from a raw coordinate vector (dim N^2).
// Requires the implied system density MM^dag to be full rank.
CompositeState composite_from_vector(const StateVector& v, Eigen::Index system_dim,
                                     AncillaConvention convention);

struct BlochVector {
    double x = 0.0, y = 0.0, z = 0.0;
    double norm() const;
};

// x_k = Tr(rho sigma_k); dim-2 only.
BlochVector bloch_from_density(const DensityMatrix& rho);

// rho = (1 + x . sigma)/2. Throws NormExceedsOne when |x| > 1 + 1e-10.
DensityMatrix density_from_bloch(const BlochVector& x);

// Bloch action of U = (1 - i sigma.a)/sqrt(2) (a unit vector, a quarter turn
// about a): x' = (x.a) a + a x x. Preserves |x|.
BlochVector bloch_rotate(const BlochVector& x, const BlochVector& a);

} // namespace phase
