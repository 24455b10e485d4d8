#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "igp/core.hpp"
#include "igp/sampling.hpp"

namespace igp {

struct TakagiOptions {
    double cluster_gap = 1e-7;  // A-eigenvalues closer than this share a block
    double residual_tol = 1e-8;
    int max_retries = 3;
    std::uint64_t retry_seed = 0x54414B41ULL; // stream for the retry rotations
};

struct TakagiFactors {
    OrthogonalMatrix orthogonal;
    CVector phases; // diagonal of D, unimodular entries
    double residual = 0.0;
};

namespace detail {

/// One factorization attempt. M = A + iB with A, B real symmetric and
/// commuting; eigendecompose A, then rediagonalize B inside each cluster of
/// near-degenerate A-eigenvalues.
inline bool takagi_attempt(const CMatrix& m, double cluster_gap, double residual_tol,
                           RMatrix& o_out, CVector& d_out, double& resid_out) {
    const int d = static_cast<int>(m.rows());
    RMatrix a = m.real();
    RMatrix b = m.imag();
    a = 0.5 * (a + a.transpose().eval());
    b = 0.5 * (b + b.transpose().eval());

    Eigen::SelfAdjointEigenSolver<RMatrix> es_a(a);
    if (es_a.info() != Eigen::Success) {
        return false;
    }
    const RVector evals = es_a.eigenvalues();
    RMatrix o = es_a.eigenvectors();

    int i = 0;
    while (i < d) {
        int j = i + 1;
        while (j < d && evals(j) - evals(j - 1) < cluster_gap) {
            ++j;
        }
        if (j - i > 1) {
            const RMatrix block = o.middleCols(i, j - i);
            RMatrix b_sub = block.transpose() * b * block;
            b_sub = 0.5 * (b_sub + b_sub.transpose().eval());
            Eigen::SelfAdjointEigenSolver<RMatrix> es_b(b_sub);
            if (es_b.info() != Eigen::Success) {
                return false;
            }
            o.middleCols(i, j - i) = block * es_b.eigenvectors();
        }
        i = j;
    }

    const CMatrix oc = o.cast<Complex>();
    const CMatrix rotated = oc.transpose() * m * oc;
    CVector diag(d);
    for (int k = 0; k < d; ++k) {
        diag(k) = rotated(k, k);
    }
    const double resid = (m - oc * diag.asDiagonal() * oc.transpose()).norm();
    double unimod_dev = 0.0;
    for (int k = 0; k < d; ++k) {
        unimod_dev = std::max(unimod_dev, std::abs(std::abs(diag(k)) - 1.0));
    }
    if (resid > residual_tol || unimod_dev > 1e-10) {
        return false;
    }
    o_out = std::move(o);
    d_out = std::move(diag);
    resid_out = resid;
    return true;
}

} // namespace detail

/// Factor a symmetric unitary as M = O D O^T with O real orthogonal and D
/// diagonal unimodular. Joint-diagonalization degeneracies are broken by a
/// random orthogonal pre-rotation on retry; the rotation stream is seeded
/// from the options so the whole procedure is reproducible.
inline TakagiFactors takagi_symmetric_unitary(const CMatrix& m, const TakagiOptions& opt = {}) {
    require_square(m, "takagi_symmetric_unitary");
    const int d = static_cast<int>(m.rows());
    const double sym_dev = (m - m.transpose()).norm();
    const double uni_dev = (m.adjoint() * m - CMatrix::Identity(d, d)).norm();
    if (sym_dev > 1e-8 || uni_dev > 1e-8) {
        throw NotSymmetricUnitary("takagi_symmetric_unitary: ||M - M^T|| = " +
                                  std::to_string(sym_dev) + ", ||M^dag M - I|| = " +
                                  std::to_string(uni_dev));
    }

    RMatrix o;
    CVector diag;
    double resid = 0.0;
    if (detail::takagi_attempt(m, opt.cluster_gap, opt.residual_tol, o, diag, resid)) {
        return TakagiFactors{OrthogonalMatrix(std::move(o)), std::move(diag), resid};
    }

    RngStream rng(opt.retry_seed, 0);
    for (int attempt = 0; attempt < opt.max_retries; ++attempt) {
        const OrthogonalMatrix r = haar_orthogonal(d, rng);
        const CMatrix rc = r.complex_mat();
        const CMatrix rotated = rc.transpose() * m * rc;
        if (detail::takagi_attempt(rotated, opt.cluster_gap, opt.residual_tol, o, diag, resid)) {
            RMatrix composed = r.mat() * o;
            return TakagiFactors{OrthogonalMatrix(std::move(composed)), std::move(diag), resid};
        }
    }
    throw FactorizationFailed("takagi_symmetric_unitary: residual above " +
                              std::to_string(opt.residual_tol) + " after " +
                              std::to_string(opt.max_retries) + " retries");
}

} // namespace igp
