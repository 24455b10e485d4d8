#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "igp/core.hpp"
#include "igp/takagi.hpp"

namespace igp {

enum class PurityContext { fixed_purity, pure, uniform_average, hs_average, haar_mean };

/// An imaginarity-generating-power figure together with the ensemble it was
/// computed for.
struct IgpValue {
    double value = 0.0;
    int dim = 0;
    PurityContext context = PurityContext::pure;
    double purity = 1.0; // meaningful for fixed_purity and pure contexts
};

namespace detail {

/// tr(U^T U) = sum_ij U_ij^2, an O(d^2) route to tr(U^dag U^*) = conj of it.
inline Complex m_trace_from_entries(const CMatrix& u) {
    Complex t(0.0, 0.0);
    const int d = static_cast<int>(u.rows());
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            t += u(i, j) * u(i, j);
        }
    }
    return std::conj(t);
}

inline bool entries_exactly_real(const CMatrix& u) {
    const int d = static_cast<int>(u.rows());
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (u(i, j).imag() != 0.0) {
                return false;
            }
        }
    }
    return true;
}

/// |tr(U^dag U^*)|^2. Exactly d^2 for real-entried input, which keeps free
/// operators at exactly zero power downstream.
inline double m_trace_abs_sq(const CMatrix& u) {
    if (entries_exactly_real(u)) {
        const double d = static_cast<double>(u.rows());
        return d * d;
    }
    return std::norm(m_trace_from_entries(u));
}

inline double purity_factor(int d, double p, const char* what) {
    if (d < 2) {
        throw DimensionTooSmall(std::string(what) + ": need d >= 2");
    }
    if (p < 1.0 / d - 1e-12 || p > 1.0 + 1e-12) {
        throw PurityOutOfRange(std::string(what) + ": purity " + std::to_string(p) +
                               " outside [1/" + std::to_string(d) + ", 1]");
    }
    const double num = static_cast<double>(d) * p - 1.0;
    if (std::abs(num) <= 1e-12) {
        return 0.0; // maximally mixed ensemble generates nothing
    }
    return num / (d - 1);
}

} // namespace detail

/// M = U^dag U^*, the symmetric unitary whose trace modulus carries all the
/// power information. Symmetry and unitarity of the product are asserted.
inline CMatrix m_matrix(const UnitaryMatrix& u) {
    CMatrix m = u.mat().adjoint() * u.mat().conjugate();
    const double sym_dev = (m - m.transpose()).norm();
    const double uni_dev = (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).norm();
    if (sym_dev > 1e-10 || uni_dev > 1e-10) {
        throw Error("m_matrix: product not symmetric unitary (sym dev " + std::to_string(sym_dev) +
                    ", unitary dev " + std::to_string(uni_dev) + ")");
    }
    return m;
}

/// |tr(U^dag U^*)|^2, computed in O(d^2) from the entries of U.
inline double m_trace_abs_sq(const UnitaryMatrix& u) {
    return detail::m_trace_abs_sq(u.mat());
}

/// Power over real pure states: (d^2 - |tr(U^dag U^*)|^2) / (2d(d+2)).
inline IgpValue igp_pure(const UnitaryMatrix& u) {
    const double d = static_cast<double>(u.dim());
    const double y = detail::m_trace_abs_sq(u.mat());
    const double value = std::max(0.0, (d * d - y) / (2.0 * d * (d + 2.0)));
    return IgpValue{value, u.dim(), PurityContext::pure, 1.0};
}

/// Orthogonal operators are free: zero power, exactly.
inline IgpValue igp_pure(const OrthogonalMatrix& o) {
    return IgpValue{0.0, o.dim(), PurityContext::pure, 1.0};
}

/// Power over real states of fixed purity P:
/// (d^2 - |tr(U^dag U^*)|^2) / (2d(d+2)) * (dP-1)/(d-1).
inline IgpValue igp_at_purity(const UnitaryMatrix& u, double p) {
    const double factor = detail::purity_factor(u.dim(), p, "igp_at_purity");
    return IgpValue{igp_pure(u).value * factor, u.dim(), PurityContext::fixed_purity, p};
}

/// Purity average with r uniform on [0, sqrt(d-1)]: one third of the pure
/// value, via <P> = (2+d)/(3d).
inline IgpValue igp_avg_uniform(const UnitaryMatrix& u) {
    return IgpValue{igp_pure(u).value / 3.0, u.dim(), PurityContext::uniform_average, 0.0};
}

/// Purity average under the Hilbert-Schmidt distribution of r^2:
/// (d^2 - |tr(U^dag U^*)|^2)(d+1) / (2d(d+2)(d^2+1)).
inline IgpValue igp_avg_hs(const UnitaryMatrix& u) {
    const double d = static_cast<double>(u.dim());
    const double y = detail::m_trace_abs_sq(u.mat());
    const double value =
        std::max(0.0, (d * d - y) * (d + 1.0) / (2.0 * d * (d + 2.0) * (d * d + 1.0)));
    return IgpValue{value, u.dim(), PurityContext::hs_average, 0.0};
}

/// Purity of a real state at hypersphere radius r: (r^2 + 1)/d.
inline double purity_from_radius(double r, int d) {
    if (d < 1) {
        throw DimensionTooSmall("purity_from_radius: need d >= 1");
    }
    const double rmax = std::sqrt(static_cast<double>(d - 1));
    if (r < -1e-12 || r > rmax + 1e-12) {
        throw RadiusOutOfRange("purity_from_radius: r = " + std::to_string(r) +
                               " outside [0, sqrt(d-1) = " + std::to_string(rmax) + "]");
    }
    return (r * r + 1.0) / d;
}

/// Haar average of the purity-constrained power over the unitary group:
/// (dP - 1) / (2(d+1)).
inline IgpValue haar_mean_igp(int d, double p) {
    detail::purity_factor(d, p, "haar_mean_igp"); // range check only
    const double num = static_cast<double>(d) * p - 1.0;
    const double value = std::abs(num) <= 1e-12 ? 0.0 : num / (2.0 * (d + 1.0));
    return IgpValue{value, d, PurityContext::haar_mean, p};
}

/// Largest attainable power over real pure states: d / (2(d+2)).
inline double igp_max(int d) {
    if (d < 2) {
        throw DimensionTooSmall("igp_max: need d >= 2");
    }
    return static_cast<double>(d) / (2.0 * (d + 2.0));
}

/// Largest attainable power at fixed purity: d/(2(d+2)) * (dP-1)/(d-1).
inline double igp_max_at_purity(int d, double p) {
    return igp_max(d) * detail::purity_factor(d, p, "igp_max_at_purity");
}

/// Power over its maximum, (d^2 - |tr(U^dag U^*)|^2) / d^2. Purity-independent.
inline double igp_normalized(const UnitaryMatrix& u) {
    const double d = static_cast<double>(u.dim());
    const double y = detail::m_trace_abs_sq(u.mat());
    return std::clamp((d * d - y) / (d * d), 0.0, 1.0);
}

/// Diagonal phase pattern theta_1..theta_d (radians).
struct PhaseProfile {
    RVector thetas;
};

struct GeneralizedPauliZ {
    UnitaryMatrix matrix;
    bool free_up_to_phase = false; // m = 0 (mod d): a phase times the identity
};

/// diag(e^{i pi j m / d}) for j = 0..d-1. Attains the maximal power whenever
/// m != 0 (mod d); otherwise it is free up to a global phase, which the flag
/// reports.
inline GeneralizedPauliZ make_pauli_z_unitary(int d, int m) {
    if (d < 2) {
        throw DimensionTooSmall("make_pauli_z_unitary: need d >= 2");
    }
    CMatrix u = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        const double theta = std::numbers::pi * static_cast<double>(j) * m / d;
        u(j, j) = Complex(std::cos(theta), std::sin(theta));
    }
    const bool free = ((m % d) + d) % d == 0;
    GeneralizedPauliZ result{UnitaryMatrix(std::move(u)), free};
    if (!free && std::abs(igp_pure(result.matrix).value - igp_max(d)) > 1e-12) {
        throw Error("make_pauli_z_unitary: phase sum failed to cancel");
    }
    return result;
}

/// O1 diag(e^{i theta_j}) O2 with sum_j e^{2 i theta_j} = 0, the general form
/// of a maximal-power unitary.
inline UnitaryMatrix make_max_igp_unitary(const OrthogonalMatrix& o1, const PhaseProfile& profile,
                                          const OrthogonalMatrix& o2, double eps_max = 1e-10) {
    const int d = o1.dim();
    if (o2.dim() != d || static_cast<int>(profile.thetas.size()) != d) {
        throw DimensionMismatch("make_max_igp_unitary: dressing/profile dimensions disagree");
    }
    if (!profile.thetas.allFinite()) {
        throw Error("make_max_igp_unitary: non-finite phase");
    }
    Complex constraint(0.0, 0.0);
    CVector diag(d);
    for (int j = 0; j < d; ++j) {
        const double th = profile.thetas(j);
        diag(j) = Complex(std::cos(th), std::sin(th));
        constraint += Complex(std::cos(2.0 * th), std::sin(2.0 * th));
    }
    if (std::abs(constraint) > eps_max) {
        throw PhaseConstraintViolated("make_max_igp_unitary: |sum e^{2i theta}| = " +
                                      std::to_string(std::abs(constraint)) + " exceeds " +
                                      std::to_string(eps_max));
    }
    CMatrix u = o1.complex_mat() * diag.asDiagonal() * o2.complex_mat();
    UnitaryMatrix result(std::move(u));
    if (std::abs(igp_pure(result).value - igp_max(d)) > 1e-10) {
        throw Error("make_max_igp_unitary: constructed unitary misses the maximum");
    }
    return result;
}

/// Deterministic free superoperation U -> O1 U O2.
inline UnitaryMatrix free_superop_conjugate(const UnitaryMatrix& u, const OrthogonalMatrix& o1,
                                            const OrthogonalMatrix& o2) {
    if (o1.dim() != u.dim() || o2.dim() != u.dim()) {
        throw DimensionMismatch("free_superop_conjugate: dimensions disagree");
    }
    return UnitaryMatrix(o1.complex_mat() * u.mat() * o2.complex_mat());
}

} // namespace igp
