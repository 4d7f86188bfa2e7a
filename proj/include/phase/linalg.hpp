// linalg.hpp
// Dense complex kernel for small dimensions (system dim <= ~8, composite
// dim <= ~64): Hermitian eigendecomposition with a deterministic gauge,
// matrix exponential, polar decomposition, Kronecker product, and the small
// helpers the rest of the library leans on. All functions are pure.

#pragma once

#include <complex>
#include <Eigen/Dense>

#include "phase/errors.hpp"

namespace phase {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kRankTol = 1e-12;

struct EigResult {
    RealVector eigenvalues;     // ascending
    ComplexMatrix eigenvectors; // orthonormal columns, deterministic gauge
    bool degenerate = false;    // adjacent gap below threshold
};

// Hermitian symmetrization residual max|M - M^dagger|.
double hermiticity_residual(const ComplexMatrix& M);

// Eigendecomposition of a Hermitian matrix. Gauge: each eigenvector's
// largest-magnitude entry is made real nonnegative, so repeated calls on the
// same matrix are bitwise identical. Sets the degenerate flag when an
// adjacent eigenvalue gap is below 1e-9*(1+|M|).
// Throws NotHermitian if the symmetrization residual exceeds tolerance.
EigResult eig_hermitian(const ComplexMatrix& M, double tol = 1e-10);

// Matrix exponential. Hermitian and anti-Hermitian inputs go through the
// spectral route; everything else through scaling-and-squaring Pade.
ComplexMatrix expm(const ComplexMatrix& M);

struct PolarResult {
    ComplexMatrix P; // positive-semidefinite Hermitian factor
    ComplexMatrix U; // unitary factor, W = P*U
};

// Polar decomposition W = P U with P = sqrt(W W^dagger).
// Throws RankDeficient if the smallest singular value is below 1e-12.
PolarResult polar_decompose(const ComplexMatrix& W);

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B);

inline ComplexMatrix dagger(const ComplexMatrix& M) { return M.adjoint(); }

Complex trace(const ComplexMatrix& M);

// Checked product: throws ShapeMismatch on incompatible inner dimensions.
ComplexMatrix matmul(const ComplexMatrix& A, const ComplexMatrix& B);

// Hermitian square root via the spectral theorem; clamps tiny negative
// eigenvalues at zero. Input must be Hermitian PSD within tolerance.
ComplexMatrix sqrt_psd(const ComplexMatrix& M);

double unitarity_residual(const ComplexMatrix& U);

// Pauli matrices and the 2x2 identity.
ComplexMatrix pauli(int k); // k = 0 -> identity, 1,2,3 -> sigma_1..3

// Principal value of a phase, reduced into (-pi, pi].
double mod_two_pi(double raw);

// Circular distance between two phases, in [0, pi].
double circular_distance(double a, double b);

} // namespace phase
