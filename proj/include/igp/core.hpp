#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>

#include "igp/errors.hpp"

namespace igp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Validation tolerances. Defaults assume double precision with O(d^3)
/// factorizations at d <= 128.
struct Tolerances {
    double hermitian = 1e-10;
    double unitary = 1e-10;
    double norm = 1e-10;
    double psd = 1e-9;
    double trace = 1e-10;
};

inline bool all_finite(const CMatrix& m) {
    return m.allFinite();
}

inline void require_square(const CMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw DimensionMismatch(std::string(what) + ": expected a nonempty square matrix, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!all_finite(m)) {
        throw Error(std::string(what) + ": matrix has non-finite entries");
    }
}

/// Hermitian, positive-semidefinite, unit-trace matrix. Immutable once
/// constructed; all downstream operations trust the validation done here.
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix m, const Tolerances& tol = {}) : mat_(std::move(m)) {
        require_square(mat_, "DensityMatrix");
        const double herm_dev = (mat_ - mat_.adjoint()).norm();
        if (herm_dev > tol.hermitian) {
            throw NotHermitian("DensityMatrix: ||rho - rho^dag|| = " + std::to_string(herm_dev) +
                               " exceeds bound " + std::to_string(tol.hermitian));
        }
        // Symmetrize before the PSD check so pure projectors with rounding
        // noise pass cleanly.
        mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
        const double trace_dev = std::abs(mat_.trace() - Complex(1.0, 0.0));
        if (trace_dev > tol.trace) {
            throw TraceNotOne("DensityMatrix: |tr(rho) - 1| = " + std::to_string(trace_dev) +
                              " exceeds bound " + std::to_string(tol.trace));
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(mat_, Eigen::EigenvaluesOnly);
        const double min_eig = es.eigenvalues().minCoeff();
        if (min_eig < -tol.psd) {
            throw NotPositive("DensityMatrix: smallest eigenvalue " + std::to_string(min_eig) +
                              " below bound " + std::to_string(-tol.psd));
        }
    }

    const CMatrix& mat() const { return mat_; }
    int dim() const { return static_cast<int>(mat_.rows()); }

private:
    CMatrix mat_;
};

/// Complex unitary matrix, ||U^dag U - I||_2 <= tol.unitary.
class UnitaryMatrix {
public:
    explicit UnitaryMatrix(CMatrix m, const Tolerances& tol = {}) : mat_(std::move(m)) {
        require_square(mat_, "UnitaryMatrix");
        const double dev =
            (mat_.adjoint() * mat_ - CMatrix::Identity(mat_.rows(), mat_.cols())).norm();
        if (dev > tol.unitary) {
            throw NotUnitary("UnitaryMatrix: ||U^dag U - I|| = " + std::to_string(dev) +
                             " exceeds bound " + std::to_string(tol.unitary));
        }
    }

    const CMatrix& mat() const { return mat_; }
    int dim() const { return static_cast<int>(mat_.rows()); }

private:
    CMatrix mat_;
};

/// Real orthogonal matrix. Stored with real scalars, so the imaginary part
/// of every entry is zero by construction.
class OrthogonalMatrix {
public:
    explicit OrthogonalMatrix(RMatrix m, const Tolerances& tol = {}) : mat_(std::move(m)) {
        if (mat_.rows() != mat_.cols() || mat_.rows() < 1) {
            throw DimensionMismatch("OrthogonalMatrix: expected a nonempty square matrix");
        }
        if (!mat_.allFinite()) {
            throw Error("OrthogonalMatrix: matrix has non-finite entries");
        }
        const double dev =
            (mat_.transpose() * mat_ - RMatrix::Identity(mat_.rows(), mat_.cols())).norm();
        if (dev > tol.unitary) {
            throw NotOrthogonal("OrthogonalMatrix: ||O^T O - I|| = " + std::to_string(dev) +
                                " exceeds bound " + std::to_string(tol.unitary));
        }
    }

    const RMatrix& mat() const { return mat_; }
    int dim() const { return static_cast<int>(mat_.rows()); }

    CMatrix complex_mat() const { return mat_.cast<Complex>(); }
    UnitaryMatrix as_unitary(const Tolerances& tol = {}) const {
        return UnitaryMatrix(complex_mat(), tol);
    }

private:
    RMatrix mat_;
};

/// Unit-norm complex state vector.
class PureStateVector {
public:
    explicit PureStateVector(CVector v, const Tolerances& tol = {}) : amp_(std::move(v)) {
        if (amp_.size() < 1 || !amp_.allFinite()) {
            throw Error("PureStateVector: expected a finite nonempty vector");
        }
        const double dev = std::abs(amp_.norm() - 1.0);
        if (dev > tol.norm) {
            throw NormNotOne("PureStateVector: | ||psi|| - 1 | = " + std::to_string(dev) +
                             " exceeds bound " + std::to_string(tol.norm));
        }
    }

    const CVector& amplitudes() const { return amp_; }
    int dim() const { return static_cast<int>(amp_.size()); }

private:
    CVector amp_;
};

inline DensityMatrix validate_density(const CMatrix& m, const Tolerances& tol = {}) {
    return DensityMatrix(m, tol);
}

/// Purity tr(rho^2), equal to ||rho||_F^2 for Hermitian rho. Clamped to the
/// diagnostic range [1/d - eps, 1 + eps].
inline double purity(const DensityMatrix& rho) {
    const double p = rho.mat().squaredNorm();
    const double lo = 1.0 / rho.dim() - 1e-9;
    return std::clamp(p, lo, 1.0 + 1e-9);
}

/// Squared Hilbert-Schmidt norm tr(A^dag A).
inline double hs_norm_sq(const CMatrix& a) {
    require_square(a, "hs_norm_sq");
    return a.squaredNorm();
}

/// Kronecker product with row-major block order:
/// (A (x) B)[(i*dB + k), (j*dB + l)] = A[i,j] * B[k,l].
inline CMatrix tensor(const CMatrix& a, const CMatrix& b) {
    require_square(a, "tensor");
    require_square(b, "tensor");
    return Eigen::kroneckerProduct(a, b).eval();
}

/// |phi+> = (1/sqrt(d)) sum_i |ii> in dimension d^2.
inline PureStateVector max_entangled_state(int d) {
    if (d < 2) {
        throw DimensionTooSmall("max_entangled_state: need d >= 2, got " + std::to_string(d));
    }
    CVector v = CVector::Zero(static_cast<Eigen::Index>(d) * d);
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i) {
        v(static_cast<Eigen::Index>(i) * d + i) = Complex(amp, 0.0);
    }
    return PureStateVector(std::move(v));
}

/// <psi| rho |psi>. The imaginary part must vanish up to tolerance.
inline double fidelity_pure(const PureStateVector& psi, const DensityMatrix& rho) {
    if (psi.dim() != rho.dim()) {
        throw DimensionMismatch("fidelity_pure: state dim " + std::to_string(psi.dim()) +
                                " vs density dim " + std::to_string(rho.dim()));
    }
    const Complex f = psi.amplitudes().adjoint() * rho.mat() * psi.amplitudes();
    if (std::abs(f.imag()) > 1e-10) {
        throw Error("fidelity_pure: imaginary part " + std::to_string(f.imag()) +
                    " exceeds tolerance");
    }
    return std::clamp(f.real(), 0.0, 1.0);
}

} // namespace igp
