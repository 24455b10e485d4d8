#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "igp/core.hpp"

namespace igp {

/// Finite mixture of orthogonal conjugations rho -> sum_i p_i O_i rho O_i^T.
/// Real and unital by construction.
class RealUnitalChannel {
public:
    struct Term {
        double weight;
        OrthogonalMatrix kraus;
    };

    explicit RealUnitalChannel(std::vector<Term> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) {
            throw Error("RealUnitalChannel: need at least one term");
        }
        const int d = terms_.front().kraus.dim();
        double total = 0.0;
        for (const Term& t : terms_) {
            if (t.kraus.dim() != d) {
                throw DimensionMismatch("RealUnitalChannel: mixed Kraus dimensions");
            }
            if (!(t.weight > 0.0) || t.weight > 1.0 + 1e-12) {
                throw Error("RealUnitalChannel: weight " + std::to_string(t.weight) +
                            " outside (0, 1]");
            }
            total += t.weight;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw Error("RealUnitalChannel: weights sum to " + std::to_string(total));
        }
    }

    const std::vector<Term>& terms() const { return terms_; }
    int dim() const { return terms_.front().kraus.dim(); }

private:
    std::vector<Term> terms_;
};

/// Reference-basis rotation B' = V B.
struct BasisChange {
    UnitaryMatrix v;
};

namespace detail {

/// Both forms of the Hilbert-Schmidt imaginarity on a raw Hermitian matrix,
/// for use in hot loops where the input is already trusted:
///   norm form   ||(rho - rho^*)/2||_2^2 = sum_ij Im(rho_ij)^2
///   trace form  (tr rho^2 - tr rho rho^*)/2
/// The two are cross-asserted; the norm form is returned (exactly zero for
/// real-entried input).
inline double imaginarity_of(const CMatrix& rho) {
    const int d = static_cast<int>(rho.rows());
    double norm_form = 0.0;
    double tr_rho_sq = 0.0;
    double tr_rho_rho_star = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const Complex v = rho(i, j);
            norm_form += v.imag() * v.imag();
            tr_rho_sq += std::norm(v);
            tr_rho_rho_star += (v * v).real(); // tr(rho rho^*) = Re sum rho_ij^2 for Hermitian rho
        }
    }
    const double trace_form = 0.5 * (tr_rho_sq - tr_rho_rho_star);
    if (std::abs(norm_form - trace_form) > 1e-12) {
        throw Error("imaginarity: norm form " + std::to_string(norm_form) +
                    " and trace form " + std::to_string(trace_form) + " disagree");
    }
    return norm_form;
}

} // namespace detail

/// Hilbert-Schmidt imaginarity ||(rho - rho^*)/2||_2^2 in the computational
/// basis.
inline double imaginarity(const DensityMatrix& rho) {
    return detail::imaginarity_of(rho.mat());
}

/// Imaginarity of rho's representation in the rotated basis B' = V B,
/// i.e. of V^dag rho V.
inline double imaginarity_in_basis(const DensityMatrix& rho, const BasisChange& basis) {
    if (rho.dim() != basis.v.dim()) {
        throw DimensionMismatch("imaginarity_in_basis: density dim " + std::to_string(rho.dim()) +
                                " vs basis dim " + std::to_string(basis.v.dim()));
    }
    const CMatrix rotated = basis.v.mat().adjoint() * rho.mat() * basis.v.mat();
    return imaginarity(validate_density(rotated));
}

/// Apply sum_i p_i O_i rho O_i^T. The result is revalidated so weight or
/// dimension bugs surface at the boundary.
inline DensityMatrix apply_channel(const RealUnitalChannel& ch, const DensityMatrix& rho) {
    if (ch.dim() != rho.dim()) {
        throw DimensionMismatch("apply_channel: channel dim " + std::to_string(ch.dim()) +
                                " vs density dim " + std::to_string(rho.dim()));
    }
    CMatrix out = CMatrix::Zero(rho.dim(), rho.dim());
    for (const RealUnitalChannel::Term& t : ch.terms()) {
        const CMatrix o = t.kraus.complex_mat();
        out += t.weight * (o * rho.mat() * o.transpose());
    }
    return validate_density(out);
}

} // namespace igp
