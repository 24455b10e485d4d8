#pragma once

#include <cmath>
#include <string>

#include "igp/core.hpp"
#include "igp/power.hpp"

namespace igp {

/// Outcome of the entangled-pair fidelity protocol. The inferred and direct
/// power values must coincide: |tr(U^dag U^*)|^2 = d^2 F is an identity.
struct ProtocolResult {
    double fidelity = 0.0;
    double trace_sq = 0.0; // d^2 * F
    double igp_pure_inferred = 0.0;
    double igp_direct = 0.0;
    double residual = 0.0;
};

namespace detail {

/// (U (x) U) |x> without materializing the d^2 x d^2 operator: viewing the
/// amplitudes as a d x d matrix X (row-major), the action is U X U^T.
inline CVector apply_local_pair(const CMatrix& u, const CVector& x) {
    const int d = static_cast<int>(u.rows());
    CMatrix xm(d, d);
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
            xm(i, k) = x(static_cast<Eigen::Index>(i) * d + k);
        }
    }
    const CMatrix ym = u * xm * u.transpose();
    CVector y(static_cast<Eigen::Index>(d) * d);
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
            y(static_cast<Eigen::Index>(i) * d + k) = ym(i, k);
        }
    }
    return y;
}

} // namespace detail

/// Three-step detection protocol: prepare |phi+>, apply U (x) U, measure the
/// fidelity with |phi+>. Simulated noiselessly; the d^2-dimensional state is
/// held densely, which caps the protocol at d <= 128.
inline ProtocolResult run_fidelity_protocol(const UnitaryMatrix& u) {
    const int d = u.dim();
    if (d < 2) {
        throw DimensionTooSmall("run_fidelity_protocol: need d >= 2");
    }
    if (d > 128) {
        throw Error("run_fidelity_protocol: d = " + std::to_string(d) +
                    " exceeds the dense-state cap of 128");
    }
    const PureStateVector phi = max_entangled_state(d);
    const CVector out_state = detail::apply_local_pair(u.mat(), phi.amplitudes());
    // rho_out is the pure projector onto out_state, so <phi|rho_out|phi> is
    // the squared overlap.
    const Complex overlap = phi.amplitudes().dot(out_state);
    const double fidelity = std::clamp(std::norm(overlap), 0.0, 1.0);

    ProtocolResult r;
    r.fidelity = fidelity;
    r.trace_sq = static_cast<double>(d) * d * fidelity;
    r.igp_pure_inferred =
        (static_cast<double>(d) * d - r.trace_sq) / (2.0 * d * (d + 2.0));
    r.igp_direct = igp_pure(u).value;
    r.residual = std::abs(r.igp_pure_inferred - r.igp_direct);
    if (r.residual > 1e-10) {
        throw Error("run_fidelity_protocol: identity residual " + std::to_string(r.residual) +
                    " exceeds 1e-10");
    }
    return r;
}

/// Protocol-inferred power rescaled to purity P via the (dP-1)/(d-1) factor.
inline double protocol_at_purity(const UnitaryMatrix& u, double p) {
    const double factor = detail::purity_factor(u.dim(), p, "protocol_at_purity");
    return run_fidelity_protocol(u).igp_pure_inferred * factor;
}

/// Shot-noise extension point: F is replaced by the success frequency of
/// `shots` projective measurements onto |phi+>. The residual then carries
/// statistical error of order sqrt(F(1-F)/shots) and is reported, not gated.
inline ProtocolResult run_fidelity_protocol_sampled(const UnitaryMatrix& u, std::uint64_t shots,
                                                    RngStream& rng) {
    if (shots < 1) {
        throw Error("run_fidelity_protocol_sampled: need shots >= 1");
    }
    ProtocolResult r = run_fidelity_protocol(u);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < shots; ++s) {
        if (rng.uniform() < r.fidelity) {
            ++hits;
        }
    }
    const int d = u.dim();
    r.fidelity = static_cast<double>(hits) / static_cast<double>(shots);
    r.trace_sq = static_cast<double>(d) * d * r.fidelity;
    r.igp_pure_inferred = (static_cast<double>(d) * d - r.trace_sq) / (2.0 * d * (d + 2.0));
    r.residual = std::abs(r.igp_pure_inferred - r.igp_direct);
    return r;
}

} // namespace igp
