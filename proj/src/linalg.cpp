// linalg.cpp

#include "phase/linalg.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace phase {

double hermiticity_residual(const ComplexMatrix& M) {
    if (M.rows() != M.cols()) {
        throw ShapeMismatch("hermiticity_residual: matrix is not square");
    }
    return (M - M.adjoint()).cwiseAbs().maxCoeff();
}

EigResult eig_hermitian(const ComplexMatrix& M, double tol) {
    if (M.rows() != M.cols()) {
        throw ShapeMismatch("eig_hermitian: matrix is not square");
    }
    if (hermiticity_residual(M) > tol) {
        throw NotHermitian("eig_hermitian: symmetrization residual exceeds tolerance");
    }
    const ComplexMatrix H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(H);
    if (solver.info() != Eigen::Success) {
        throw NumericError("eig_hermitian: solver did not converge");
    }

    EigResult out;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();

    // Deterministic gauge: rotate each column so its largest-magnitude entry
    // is real nonnegative. Ties broken by the lowest row index.
    const Eigen::Index n = H.rows();
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index imax = 0;
        double amax = -1.0;
        for (Eigen::Index r = 0; r < n; ++r) {
            const double a = std::abs(out.eigenvectors(r, c));
            if (a > amax + 1e-15) {
                amax = a;
                imax = r;
            }
        }
        const Complex pivot = out.eigenvectors(imax, c);
        if (std::abs(pivot) > 0.0) {
            out.eigenvectors.col(c) *= std::conj(pivot) / std::abs(pivot);
            // Force the pivot exactly real: kills the O(eps) imaginary dust
            // that would otherwise break bitwise reproducibility downstream.
            out.eigenvectors(imax, c) = Complex(std::abs(out.eigenvectors(imax, c)), 0.0);
        }
    }

    const double scale = 1.0 + H.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (out.eigenvalues(k + 1) - out.eigenvalues(k) < 1e-9 * scale) {
            out.degenerate = true;
            break;
        }
    }
    return out;
}

ComplexMatrix expm(const ComplexMatrix& M) {
    if (M.rows() != M.cols()) {
        throw ShapeMismatch("expm: matrix is not square");
    }
    const double herm = (M - M.adjoint()).cwiseAbs().maxCoeff();
    const double anti = (M + M.adjoint()).cwiseAbs().maxCoeff();
    const double scale = 1.0 + M.cwiseAbs().maxCoeff();

    if (herm <= kHermitianTol * scale) {
        // Hermitian: V exp(diag) V^dagger.
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (M + M.adjoint()));
        const RealVector ev = solver.eigenvalues();
        return solver.eigenvectors() * ev.array().exp().matrix().asDiagonal() *
               solver.eigenvectors().adjoint();
    }
    if (anti <= kHermitianTol * scale) {
        // Anti-Hermitian: M = iH, exp(M) = V exp(i diag) V^dagger.
        const ComplexMatrix H = (0.5 * (M - M.adjoint())) / Complex(0.0, 1.0);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (H + H.adjoint()));
        const RealVector ev = solver.eigenvalues();
        Eigen::VectorXcd ph(ev.size());
        for (Eigen::Index k = 0; k < ev.size(); ++k) {
            ph(k) = std::exp(Complex(0.0, ev(k)));
        }
        return solver.eigenvectors() * ph.asDiagonal() * solver.eigenvectors().adjoint();
    }
    return M.exp(); // scaling-and-squaring Pade
}

PolarResult polar_decompose(const ComplexMatrix& W) {
    if (W.rows() != W.cols()) {
        throw ShapeMismatch("polar_decompose: matrix is not square");
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(W, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues()(svd.singularValues().size() - 1) < kRankTol) {
        throw RankDeficient("polar_decompose: smallest singular value below 1e-12");
    }
    PolarResult out;
    out.P = svd.matrixU() * svd.singularValues().asDiagonal() * svd.matrixU().adjoint();
    out.P = 0.5 * (out.P + out.P.adjoint());
    out.U = svd.matrixU() * svd.matrixV().adjoint();
    return out;
}

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
    ComplexMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return out;
}

Complex trace(const ComplexMatrix& M) {
    if (M.rows() != M.cols()) {
        throw ShapeMismatch("trace: matrix is not square");
    }
    return M.trace();
}

ComplexMatrix matmul(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.cols() != B.rows()) {
        throw ShapeMismatch("matmul: inner dimensions disagree");
    }
    return A * B;
}

ComplexMatrix sqrt_psd(const ComplexMatrix& M) {
    const EigResult eig = eig_hermitian(M);
    if (eig.eigenvalues(0) < -1e-10 * (1.0 + std::abs(eig.eigenvalues(eig.eigenvalues.size() - 1)))) {
        throw NumericError("sqrt_psd: matrix has a significantly negative eigenvalue");
    }
    RealVector roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
}

double unitarity_residual(const ComplexMatrix& U) {
    if (U.rows() != U.cols()) {
        throw ShapeMismatch("unitarity_residual: matrix is not square");
    }
    const ComplexMatrix I = ComplexMatrix::Identity(U.rows(), U.cols());
    return std::max((U.adjoint() * U - I).cwiseAbs().maxCoeff(),
                    (U * U.adjoint() - I).cwiseAbs().maxCoeff());
}

ComplexMatrix pauli(int k) {
    ComplexMatrix s(2, 2);
    const Complex i(0.0, 1.0);
    switch (k) {
        case 0: s << 1, 0, 0, 1; break;
        case 1: s << 0, 1, 1, 0; break;
        case 2: s << 0, -i, i, 0; break;
        case 3: s << 1, 0, 0, -1; break;
        default: throw ShapeMismatch("pauli: index must be 0..3");
    }
    return s;
}

double mod_two_pi(double raw) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double m = std::remainder(raw, two_pi); // (-pi, pi] up to the -pi edge
    if (m <= -std::numbers::pi) {
        m += two_pi;
    }
    return m;
}

double circular_distance(double a, double b) {
    return std::abs(mod_two_pi(a - b));
}

} // namespace phase
