#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "igp/core.hpp"
#include "igp/measures.hpp"
#include "igp/power.hpp"
#include "igp/sampling.hpp"

namespace igp {

/// Monte Carlo estimate. Fully determined by (seed, streams): worker w draws
/// from RngStream(seed, stream_base + w) and partial sums are combined in
/// worker order, so results never depend on scheduling.
struct MCEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::uint32_t streams = 1;
};

struct McConfig {
    std::uint64_t seed = 0;
    std::uint32_t streams = 1;
    std::uint64_t stream_base = 0;
};

namespace detail {

template <class Fn>
inline void run_workers(std::uint32_t count, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) {
        hw = 1;
    }
    const unsigned nthreads = std::min<unsigned>(count, hw);
    if (nthreads <= 1) {
        for (std::uint32_t w = 0; w < count; ++w) {
            fn(w);
        }
        return;
    }
    std::atomic<std::uint32_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (std::uint32_t w = next.fetch_add(1); w < count; w = next.fetch_add(1)) {
                fn(w);
            }
        });
    }
    for (std::thread& th : pool) {
        th.join();
    }
}

inline std::uint64_t worker_count(std::uint64_t n, std::uint32_t streams, std::uint32_t w) {
    return n / streams + (w < n % streams ? 1 : 0);
}

/// Mean and standard error of sample(rng) over n draws.
template <class SampleFn>
MCEstimate mc_mean(std::uint64_t n, const McConfig& cfg, SampleFn&& sample) {
    if (n < 2) {
        throw Error("mc_mean: need n >= 2");
    }
    const std::uint32_t streams = std::max<std::uint32_t>(cfg.streams, 1);
    std::vector<double> sums(streams, 0.0);
    std::vector<double> sumsqs(streams, 0.0);
    std::vector<std::exception_ptr> errors(streams);
    run_workers(streams, [&](std::uint32_t w) {
        try {
            RngStream rng(cfg.seed, cfg.stream_base + w);
            const std::uint64_t nw = worker_count(n, streams, w);
            double s = 0.0;
            double s2 = 0.0;
            for (std::uint64_t k = 0; k < nw; ++k) {
                const double v = sample(rng);
                s += v;
                s2 += v * v;
            }
            sums[w] = s;
            sumsqs[w] = s2;
        } catch (...) {
            errors[w] = std::current_exception();
        }
    });
    for (const std::exception_ptr& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    double sum = 0.0;
    double sumsq = 0.0;
    for (std::uint32_t w = 0; w < streams; ++w) {
        sum += sums[w];
        sumsq += sumsqs[w];
    }
    const double mean = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, (sumsq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1));
    return MCEstimate{mean, std::sqrt(var / static_cast<double>(n)), n, cfg.seed, streams};
}

/// All n sample values, ordered by (worker, position within worker).
template <class SampleFn>
std::vector<double> mc_samples(std::uint64_t n, const McConfig& cfg, SampleFn&& sample) {
    const std::uint32_t streams = std::max<std::uint32_t>(cfg.streams, 1);
    std::vector<std::uint64_t> offsets(streams + 1, 0);
    for (std::uint32_t w = 0; w < streams; ++w) {
        offsets[w + 1] = offsets[w] + worker_count(n, streams, w);
    }
    std::vector<double> xs(n, 0.0);
    std::vector<std::exception_ptr> errors(streams);
    run_workers(streams, [&](std::uint32_t w) {
        try {
            RngStream rng(cfg.seed, cfg.stream_base + w);
            for (std::uint64_t k = offsets[w]; k < offsets[w + 1]; ++k) {
                xs[k] = sample(rng);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    });
    for (const std::exception_ptr& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return xs;
}

inline double sample_variance(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    double mean = 0.0;
    for (double x : xs) {
        mean += x;
    }
    mean /= static_cast<double>(n);
    double acc = 0.0;
    for (double x : xs) {
        const double dev = x - mean;
        acc += dev * dev;
    }
    return acc / static_cast<double>(n - 1);
}

} // namespace detail

/// z statistic of an estimate against its oracle. A zero-spread estimate is
/// an exact computation: z is 0 on agreement and infinite otherwise.
inline double z_score(const MCEstimate& e, double oracle) {
    if (e.std_err > 0.0) {
        return (e.mean - oracle) / e.std_err;
    }
    return std::abs(e.mean - oracle) <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
}

/// Estimator wire record {op, params, mean, stderr, n, seed, streams, oracle, z}.
inline nlohmann::json estimate_record(const std::string& op, nlohmann::json params,
                                      const MCEstimate& e, double oracle) {
    return nlohmann::json{{"op", op},           {"params", std::move(params)},
                          {"mean", e.mean},     {"stderr", e.std_err},
                          {"n", e.n},           {"seed", e.seed},
                          {"streams", e.streams}, {"oracle", oracle},
                          {"z", z_score(e, oracle)}};
}

/// Mean imaginarity of U rho U^dag over random real states of purity P.
inline MCEstimate mc_igp(const UnitaryMatrix& u, double p, std::uint64_t n, SpectrumMode mode,
                         const McConfig& cfg) {
    detail::check_purity_range(u.dim(), p, "mc_igp");
    if (n < 100) {
        throw Error("mc_igp: need n >= 100");
    }
    const CMatrix& umat = u.mat();
    const int d = u.dim();
    return detail::mc_mean(n, cfg, [&](RngStream& rng) {
        const DensityMatrix rho = real_state_at_purity(d, p, rng, mode);
        // A scalar rho commutes with U: the evolved state is rho itself,
        // real-entried, so the sample is an exact zero.
        bool scalar = true;
        const Complex first = rho.mat()(0, 0);
        for (int i = 0; i < d && scalar; ++i) {
            for (int j = 0; j < d; ++j) {
                if (rho.mat()(i, j) != (i == j ? first : Complex(0.0, 0.0))) {
                    scalar = false;
                    break;
                }
            }
        }
        if (scalar) {
            return 0.0;
        }
        const CMatrix evolved = umat * rho.mat() * umat.adjoint();
        return detail::imaginarity_of(evolved);
    });
}

/// Haar mean of the fixed-purity power, closed form per sampled unitary.
inline MCEstimate mc_haar_mean_igp(int d, double p, std::uint64_t n, const McConfig& cfg) {
    detail::check_purity_range(d, p, "mc_haar_mean_igp");
    if (n < 100) {
        throw Error("mc_haar_mean_igp: need n >= 100");
    }
    return detail::mc_mean(n, cfg, [&](RngStream& rng) {
        return igp_at_purity(haar_unitary(d, rng), p).value;
    });
}

/// Sample moment of y = |tr(U^dag U^*)|^2 over Haar unitaries. Order 1 has
/// the exact value 2d/(d+1); order 2 targets the large-d form 8 + 64/d^2.
inline MCEstimate mc_moment_y(int d, int order, std::uint64_t n, const McConfig& cfg) {
    if (d < 1) {
        throw DimensionTooSmall("mc_moment_y: need d >= 1");
    }
    if (order != 1 && order != 2) {
        throw Error("mc_moment_y: order must be 1 or 2");
    }
    if (n < 1000) {
        throw Error("mc_moment_y: need n >= 1000");
    }
    return detail::mc_mean(n, cfg, [&](RngStream& rng) {
        const double y = m_trace_abs_sq(haar_unitary(d, rng));
        return order == 1 ? y : y * y;
    });
}

struct VarianceEstimate {
    double variance = 0.0;
    double ci_lo = 0.0; // 99% percentile bootstrap interval
    double ci_hi = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::uint32_t streams = 1;
};

namespace detail {

/// Percentile bootstrap interval for the variance of xs. Resample indices
/// come from the dedicated stream passed in.
inline void bootstrap_variance_ci(const std::vector<double>& xs, int resamples, RngStream& rng,
                                  double& lo, double& hi) {
    const std::size_t n = xs.size();
    std::vector<double> vars(static_cast<std::size_t>(resamples));
    std::vector<double> buf(n);
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t k = 0; k < n; ++k) {
            buf[k] = xs[static_cast<std::size_t>(rng.uniform() * static_cast<double>(n))];
        }
        vars[static_cast<std::size_t>(b)] = sample_variance(buf);
    }
    std::sort(vars.begin(), vars.end());
    const std::size_t tail = static_cast<std::size_t>(resamples) / 200; // 0.5% per side
    lo = vars[tail];
    hi = vars[static_cast<std::size_t>(resamples) - 1 - tail];
}

} // namespace detail

/// Sample variance of the normalized power over Haar unitaries, with a 99%
/// bootstrap interval (10^3 resamples from the stream after the workers).
inline VarianceEstimate mc_variance_normalized_igp(int d, std::uint64_t n, const McConfig& cfg) {
    if (d < 2) {
        throw DimensionTooSmall("mc_variance_normalized_igp: need d >= 2");
    }
    if (n < 1000) {
        throw Error("mc_variance_normalized_igp: need n >= 1000");
    }
    const std::vector<double> xs = detail::mc_samples(
        n, cfg, [&](RngStream& rng) { return igp_normalized(haar_unitary(d, rng)); });
    VarianceEstimate out;
    out.variance = detail::sample_variance(xs);
    RngStream boot(cfg.seed, cfg.stream_base + std::max<std::uint32_t>(cfg.streams, 1));
    detail::bootstrap_variance_ci(xs, 1000, boot, out.ci_lo, out.ci_hi);
    out.n = n;
    out.seed = cfg.seed;
    out.streams = std::max<std::uint32_t>(cfg.streams, 1);
    return out;
}

struct ConcentrationProbe {
    double fraction_above = 0.0;
    double threshold = 0.0;  // 1 - 3/d^{2/3}
    double levy_bound = 0.0; // 1 - exp(-d^{2/3}/64)
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::uint32_t streams = 1;
};

/// Empirical weight of Haar draws with near-maximal normalized power,
/// reported against the Levy lower bound (Lipschitz constant 4/sqrt(d)).
inline ConcentrationProbe concentration_probe(int d, std::uint64_t n, const McConfig& cfg) {
    if (d < 2) {
        throw DimensionTooSmall("concentration_probe: need d >= 2");
    }
    if (n < 1000) {
        throw Error("concentration_probe: need n >= 1000");
    }
    const double d23 = std::pow(static_cast<double>(d), 2.0 / 3.0);
    const double threshold = 1.0 - 3.0 / d23;
    const MCEstimate indicator = detail::mc_mean(n, cfg, [&](RngStream& rng) {
        return igp_normalized(haar_unitary(d, rng)) >= threshold ? 1.0 : 0.0;
    });
    ConcentrationProbe out;
    out.fraction_above = indicator.mean;
    out.threshold = threshold;
    out.levy_bound = 1.0 - std::exp(-d23 / 64.0);
    out.n = n;
    out.seed = cfg.seed;
    out.streams = indicator.streams;
    return out;
}

/// Index tuple for the Haar-orthogonal average <O_ki O_km O_pi O_pm>.
struct MomentIndices {
    int k = 0;
    int i = 0;
    int p = 0;
    int m = 0;
};

/// Closed form of <O_ki O_km O_pi O_pm> over the orthogonal group:
/// c1 (d_im + d_kp + d_im d_kp) - c2 (1 + d_im + d_kp + 3 d_kp d_im),
/// c1 = (d+1)/(d(d-1)(d+2)), c2 = 1/(d(d-1)(d+2)).
inline double orthogonal_fourth_moment_closed(int d, const MomentIndices& idx) {
    if (d < 2) {
        throw DimensionTooSmall("orthogonal_fourth_moment_closed: need d >= 2");
    }
    for (int v : {idx.k, idx.i, idx.p, idx.m}) {
        if (v < 0 || v >= d) {
            throw Error("orthogonal_fourth_moment_closed: index " + std::to_string(v) +
                        " outside 0.." + std::to_string(d - 1));
        }
    }
    const double dd = static_cast<double>(d);
    const double denom = dd * (dd - 1.0) * (dd + 2.0);
    const double c1 = (dd + 1.0) / denom;
    const double c2 = 1.0 / denom;
    const double dim = idx.i == idx.m ? 1.0 : 0.0;
    const double dkp = idx.k == idx.p ? 1.0 : 0.0;
    return c1 * (dim + dkp + dim * dkp) - c2 * (1.0 + dim + dkp + 3.0 * dkp * dim);
}

/// Monte Carlo counterpart of the closed fourth moment.
inline MCEstimate mc_orthogonal_fourth_moment(int d, const MomentIndices& idx, std::uint64_t n,
                                              const McConfig& cfg) {
    orthogonal_fourth_moment_closed(d, idx); // validates d and the indices
    if (n < 1000) {
        throw Error("mc_orthogonal_fourth_moment: need n >= 1000");
    }
    return detail::mc_mean(n, cfg, [&](RngStream& rng) {
        const RMatrix o = haar_orthogonal(d, rng).mat();
        return o(idx.k, idx.i) * o(idx.k, idx.m) * o(idx.p, idx.i) * o(idx.p, idx.m);
    });
}

struct SpectrumIndependence {
    MCEstimate two_level;
    MCEstimate random_spectrum;
    double z = 0.0; // difference of means over combined standard error
};

/// Run mc_igp under both spectrum samplers and compare. Theorem-level the two
/// must agree: the power depends on the spectrum only through its purity.
inline SpectrumIndependence spectrum_independence_check(const UnitaryMatrix& u, double p,
                                                        std::uint64_t n, const McConfig& cfg) {
    const int d = u.dim();
    if (p <= 1.0 / d + 1e-12 || p >= 1.0 - 1e-12) {
        throw PurityOutOfRange("spectrum_independence_check: need 1/d < P < 1, got P = " +
                               std::to_string(p));
    }
    McConfig cfg_a{derive_seed(cfg.seed, 0x2B1Au), cfg.streams, cfg.stream_base};
    McConfig cfg_b{derive_seed(cfg.seed, 0xF00Du), cfg.streams, cfg.stream_base};
    SpectrumIndependence out;
    out.two_level = mc_igp(u, p, n, SpectrumMode::two_level, cfg_a);
    out.random_spectrum = mc_igp(u, p, n, SpectrumMode::random_simplex, cfg_b);
    const double se = std::sqrt(out.two_level.std_err * out.two_level.std_err +
                                out.random_spectrum.std_err * out.random_spectrum.std_err);
    const double diff = out.two_level.mean - out.random_spectrum.mean;
    if (se > 0.0) {
        out.z = diff / se;
    } else {
        out.z = std::abs(diff) <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return out;
}

} // namespace igp
