// states.cpp

#include "phase/states.hpp"

#include <cmath>

namespace phase {

const char* convention_name(AncillaConvention c) {
    return c == AncillaConvention::PURIFIED ? "purified" : "thermal-vacuum";
}

DensityMatrix density_from_matrix(const ComplexMatrix& rho) {
    if (rho.rows() != rho.cols()) {
        throw ShapeMismatch("density_from_matrix: matrix is not square");
    }
    if (hermiticity_residual(rho) > 1e-10) {
        throw NotHermitian("density_from_matrix: not Hermitian within 1e-10");
    }
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-10) {
        throw Error("density_from_matrix: trace differs from 1 beyond 1e-10");
    }
    DensityMatrix out;
    out.matrix = 0.5 * (rho + rho.adjoint());
    const EigResult eig = eig_hermitian(out.matrix);
    if (eig.eigenvalues(0) < -1e-10) {
        throw Error("density_from_matrix: negative eigenvalue beyond tolerance");
    }
    out.spectrum = eig.eigenvalues.cwiseMax(0.0);
    out.eigenbasis = eig.eigenvectors;
    return out;
}

DensityMatrix gibbs_density(const ComplexMatrix& H, double beta) {
    if (beta < 0.0) {
        throw Error("gibbs_density: beta must be nonnegative");
    }
    const EigResult eig = eig_hermitian(H);
    const double e0 = eig.eigenvalues(0);
    RealVector w(eig.eigenvalues.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        w(k) = std::exp(-beta * (eig.eigenvalues(k) - e0));
    }
    w /= w.sum();

    DensityMatrix out;
    out.matrix = eig.eigenvectors * w.asDiagonal() * eig.eigenvectors.adjoint();
    out.matrix = 0.5 * (out.matrix + out.matrix.adjoint());
    // Spectrum ascending: Gibbs weights are decreasing in energy, so reverse.
    const Eigen::Index n = w.size();
    out.spectrum.resize(n);
    out.eigenbasis.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.spectrum(k) = w(n - 1 - k);
        out.eigenbasis.col(k) = eig.eigenvectors.col(n - 1 - k);
    }
    return out;
}

ComplexMatrix CompositeState::gauge_root() const {
    return basis * lambdas.cwiseSqrt().asDiagonal() * basis.transpose();
}

ComplexMatrix CompositeState::coords() const {
    return gauge_root() * phase_op;
}

ComplexMatrix CompositeState::amplitude() const {
    return basis * lambdas.cwiseSqrt().asDiagonal() * basis.adjoint() * phase_op;
}

StateVector CompositeState::vector() const {
    const ComplexMatrix M = coords();
    const Eigen::Index n = system_dim;
    StateVector v(n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            v(i * n + j) = M(i, j);
        }
    }
    return v;
}

DensityMatrix CompositeState::system_density() const {
    DensityMatrix out;
    out.matrix = basis * lambdas.asDiagonal() * basis.adjoint();
    out.matrix = 0.5 * (out.matrix + out.matrix.adjoint());
    out.spectrum = lambdas;
    out.eigenbasis = basis;
    return out;
}

namespace {

void require_unitary(const ComplexMatrix& U, const char* who) {
    if (unitarity_residual(U) > 1e-10) {
        throw Error(std::string(who) + ": operator is not unitary within 1e-10");
    }
}

CompositeState make_state(const DensityMatrix& rho, const ComplexMatrix& U,
                          AncillaConvention tag) {
    CompositeState s;
    s.system_dim = rho.dim();
    s.convention = tag;
    s.lambdas = rho.spectrum;
    s.basis = rho.eigenbasis;
    s.phase_op = U;
    return s;
}

} // namespace

CompositeState purify(const DensityMatrix& rho, const ComplexMatrix& U) {
    if (U.rows() != rho.dim() || U.cols() != rho.dim()) {
        throw DimMismatch("purify: unitary dimension disagrees with rho");
    }
    require_unitary(U, "purify");
    if (!rho.is_full_rank()) {
        throw NotFullRank("purify: density matrix has an eigenvalue below 1e-12");
    }
    return make_state(rho, U, AncillaConvention::PURIFIED);
}

CompositeState thermal_vacuum(const ComplexMatrix& H, double beta,
                              const ComplexMatrix& U_tilde) {
    if (U_tilde.rows() != H.rows() || U_tilde.cols() != H.cols()) {
        throw DimMismatch("thermal_vacuum: unitary dimension disagrees with H");
    }
    require_unitary(U_tilde, "thermal_vacuum");
    return make_state(gibbs_density(H, beta), U_tilde,
                      AncillaConvention::THERMAL_VACUUM);
}

Complex inner_product(const CompositeState& a, const CompositeState& b) {
    if (a.system_dim != b.system_dim) {
        throw DimMismatch("inner_product: system dimensions differ");
    }
    if (a.convention != b.convention) {
        throw ConventionMismatch("inner_product: ancilla conventions differ");
    }
    if (a.convention == AncillaConvention::PURIFIED) {
        return (a.amplitude().adjoint() * b.amplitude()).trace();
    }
    return (a.coords().adjoint() * b.coords()).trace();
}

double expectation(const CompositeState& s, const ComplexMatrix& O) {
    if (O.rows() != s.system_dim || O.cols() != s.system_dim) {
        throw DimMismatch("expectation: observable dimension disagrees with system");
    }
    if (hermiticity_residual(O) > 1e-10) {
        throw NotHermitian("expectation: observable is not Hermitian");
    }
    Complex val;
    if (s.convention == AncillaConvention::PURIFIED) {
        const ComplexMatrix W = s.amplitude();
        val = (W.adjoint() * O * W).trace();
    } else {
        const ComplexMatrix M = s.coords();
        val = (M.adjoint() * O * M).trace();
    }
    return val.real();
}

CompositeState partial_transpose_ancilla(const CompositeState& s) {
    CompositeState out = s;
    out.convention = s.convention == AncillaConvention::PURIFIED
                         ? AncillaConvention::THERMAL_VACUUM
                         : AncillaConvention::PURIFIED;
    return out;
}

CompositeState apply_ancilla(const CompositeState& s, const ComplexMatrix& B) {
    if (B.rows() != s.system_dim || B.cols() != s.system_dim) {
        throw DimMismatch("apply_ancilla: operator dimension disagrees");
    }
    require_unitary(B, "apply_ancilla");
    CompositeState out = s;
    out.phase_op = s.phase_op * B;
    return out;
}

CompositeState apply_composite(const CompositeState& s, const ComplexMatrix& A,
                               const ComplexMatrix& B) {
    if (A.rows() != s.system_dim || B.rows() != s.system_dim) {
        throw DimMismatch("apply_composite: operator dimension disagrees");
    }
    require_unitary(A, "apply_composite");
    require_unitary(B, "apply_composite");
    CompositeState out = s;
    out.basis = A * s.basis;
    if (s.convention == AncillaConvention::THERMAL_VACUUM) {
        // Plain action on the coordinate vector: M = S U -> A M B, and with
        // S -> A S A^T the phase factor picks up conj(A).
        out.phase_op = A.conjugate() * s.phase_op * B;
    } else {
        // Purified states transform through their amplitude: W = sqrt(rho) U
        // -> A W B, so the polar phase factor is U -> A U B.
        out.phase_op = A * s.phase_op * B;
    }
    return out;
}

CompositeState composite_from_vector(const StateVector& v, Eigen::Index system_dim,
                                     AncillaConvention convention) {
    if (v.size() != system_dim * system_dim) {
        throw DimMismatch("composite_from_vector: length is not system_dim^2");
    }
    ComplexMatrix M(system_dim, system_dim);
    for (Eigen::Index i = 0; i < system_dim; ++i) {
        for (Eigen::Index j = 0; j < system_dim; ++j) {
            M(i, j) = v(i * system_dim + j);
        }
    }
    ComplexMatrix rho = M * M.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    const EigResult eig = eig_hermitian(rho);
    if (eig.eigenvalues(0) < kRankTol) {
        throw NotFullRank("composite_from_vector: implied density matrix is rank deficient");
    }

    CompositeState s;
    s.system_dim = system_dim;
    s.convention = convention;
    s.lambdas = eig.eigenvalues;
    s.basis = eig.eigenvectors;
    // U = S^{-1} M with S^{-1} = V diag(1/sqrt(lambda)) V^T read backwards:
    // S = V sqrt(L) V^T has inverse conj(V) L^{-1/2} V^dag... solve directly.
    const ComplexMatrix S = s.gauge_root();
    s.phase_op = S.fullPivLu().solve(M);
    if (unitarity_residual(s.phase_op) > 1e-8) {
        throw Error("composite_from_vector: implied phase operator is not unitary");
    }
    return s;
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

BlochVector bloch_from_density(const DensityMatrix& rho) {
    if (rho.dim() != 2) {
        throw DimMismatch("bloch_from_density: only dim 2 supported");
    }
    BlochVector out;
    out.x = (rho.matrix * pauli(1)).trace().real();
    out.y = (rho.matrix * pauli(2)).trace().real();
    out.z = (rho.matrix * pauli(3)).trace().real();
    return out;
}

DensityMatrix density_from_bloch(const BlochVector& x) {
    if (x.norm() > 1.0 + 1e-10) {
        throw NormExceedsOne("density_from_bloch: |x| exceeds 1");
    }
    const ComplexMatrix rho =
        0.5 * (pauli(0) + x.x * pauli(1) + x.y * pauli(2) + x.z * pauli(3));
    return density_from_matrix(rho);
}

BlochVector bloch_rotate(const BlochVector& x, const BlochVector& a) {
    const double an = a.norm();
    if (std::abs(an - 1.0) > 1e-10) {
        throw Error("bloch_rotate: axis must be a unit vector");
    }
    const double dot = x.x * a.x + x.y * a.y + x.z * a.z;
    BlochVector out;
    out.x = dot * a.x + (a.y * x.z - a.z * x.y);
    out.y = dot * a.y + (a.z * x.x - a.x * x.z);
    out.z = dot * a.z + (a.x * x.y - a.y * x.x);
    return out;
}

} // namespace phase
