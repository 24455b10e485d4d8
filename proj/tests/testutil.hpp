#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "igp/core.hpp"
#include "igp/rng.hpp"

namespace igp::test {

/// Two-sample Kolmogorov-Smirnov test. Returns true when the samples are
/// compatible at the given significance level (default 1%).
inline bool ks_two_sample_pass(std::vector<double> a, std::vector<double> b,
                               double alpha = 0.01) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double dmax = 0.0;
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib]) {
            ++ia;
        } else {
            ++ib;
        }
        const double fa = static_cast<double>(ia) / na;
        const double fb = static_cast<double>(ib) / nb;
        dmax = std::max(dmax, std::abs(fa - fb));
    }
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double crit = c * std::sqrt((na + nb) / (na * nb));
    return dmax <= crit;
}

/// Random Hermitian matrix with entries of order one, for norm identities.
inline CMatrix random_matrix(int d, RngStream& rng) {
    CMatrix m(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            m(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    return m;
}

} // namespace igp::test
