#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "igp/core.hpp"
#include "igp/measures.hpp"
#include "igp/rng.hpp"

namespace igp {

/// Nonnegative eigenvalue vector with unit sum and a declared purity.
struct Spectrum {
    RVector lambdas;
    double purity = 1.0;
};

namespace detail {

inline void check_spectrum(const Spectrum& s) {
    if (s.lambdas.minCoeff() < -1e-12) {
        throw Error("Spectrum: negative eigenvalue " + std::to_string(s.lambdas.minCoeff()));
    }
    if (std::abs(s.lambdas.sum() - 1.0) > 1e-12) {
        throw Error("Spectrum: eigenvalues sum to " + std::to_string(s.lambdas.sum()));
    }
    if (std::abs(s.lambdas.squaredNorm() - s.purity) > 1e-10) {
        throw Error("Spectrum: purity " + std::to_string(s.lambdas.squaredNorm()) +
                    " differs from declared " + std::to_string(s.purity));
    }
}

inline void check_purity_range(int d, double p, const char* what) {
    if (d < 1) {
        throw DimensionTooSmall(std::string(what) + ": need d >= 1");
    }
    if (p < 1.0 / d - 1e-12 || p > 1.0 + 1e-12) {
        throw PurityOutOfRange(std::string(what) + ": purity " + std::to_string(p) +
                               " outside [1/" + std::to_string(d) + ", 1]");
    }
}

inline CMatrix complex_ginibre(int d, RngStream& rng) {
    CMatrix a(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const double re = rng.normal();
            const double im = rng.normal();
            a(i, j) = Complex(re, im);
        }
    }
    return a;
}

inline RMatrix real_ginibre(int d, RngStream& rng) {
    RMatrix a(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            a(i, j) = rng.normal();
        }
    }
    return a;
}

} // namespace detail

/// Haar-random unitary: complex Ginibre followed by QR, with the Q columns
/// rephased so the R diagonal is positive real. This makes the factorization
/// unique and the distribution exactly Haar.
inline UnitaryMatrix haar_unitary(int d, RngStream& rng) {
    if (d < 1) {
        throw DimensionTooSmall("haar_unitary: need d >= 1");
    }
    const CMatrix a = detail::complex_ginibre(d, rng);
    Eigen::HouseholderQR<CMatrix> qr(a);
    CMatrix q = qr.householderQ();
    const CMatrix& qrmat = qr.matrixQR();
    for (int j = 0; j < d; ++j) {
        const Complex rjj = qrmat(j, j);
        const double mag = std::abs(rjj);
        const Complex phase = mag > 0.0 ? rjj / mag : Complex(1.0, 0.0);
        q.col(j) *= phase;
    }
    return UnitaryMatrix(std::move(q));
}

/// Haar-random orthogonal: real Ginibre QR with sign-corrected columns.
inline OrthogonalMatrix haar_orthogonal(int d, RngStream& rng) {
    if (d < 1) {
        throw DimensionTooSmall("haar_orthogonal: need d >= 1");
    }
    const RMatrix a = detail::real_ginibre(d, rng);
    Eigen::HouseholderQR<RMatrix> qr(a);
    RMatrix q = qr.householderQ();
    const RMatrix& qrmat = qr.matrixQR();
    for (int j = 0; j < d; ++j) {
        if (qrmat(j, j) < 0.0) {
            q.col(j) = -q.col(j);
        }
    }
    return OrthogonalMatrix(std::move(q));
}

namespace detail {

inline Spectrum uniform_spectrum(int d) {
    RVector lam = RVector::Constant(d, 1.0 / d);
    return Spectrum{lam, lam.squaredNorm()};
}

} // namespace detail

/// Two-level spectrum (a, b, ..., b) with a + (d-1) b = 1 and
/// a^2 + (d-1) b^2 = P, taking the larger root for a.
inline Spectrum spectrum_two_level(int d, double p) {
    detail::check_purity_range(d, p, "spectrum_two_level");
    if (d == 1) {
        RVector lam(1);
        lam(0) = 1.0;
        return Spectrum{lam, 1.0};
    }
    if (p <= 1.0 / d + 1e-15) {
        return detail::uniform_spectrum(d);
    }
    RVector lam(d);
    const double disc = std::max(0.0, 1.0 - d + static_cast<double>(d) * (d - 1) * p);
    const double a = (1.0 + std::sqrt(disc)) / d;
    const double b = std::max(0.0, (1.0 - a) / (d - 1));
    lam(0) = a;
    for (int i = 1; i < d; ++i) {
        lam(i) = b;
    }
    Spectrum s{lam, lam.squaredNorm()};
    detail::check_spectrum(s);
    return s;
}

/// Spectrum with the target purity but an otherwise scattered profile: a
/// flat-simplex draw is moved along the line through the uniform point until
/// sum lambda^2 = P. When the solution leaves the simplex, the offending
/// entries are clamped to zero and the move is re-solved on the surviving
/// support, whose uniform point it now runs through; the support shrinks
/// each round, so this terminates. A fresh draw is retried only in the
/// degenerate all-equal case.
inline Spectrum spectrum_random_at_purity(int d, double p, RngStream& rng) {
    detail::check_purity_range(d, p, "spectrum_random_at_purity");
    if (d == 1 || p >= 1.0 - 1e-12) {
        // The pure-state sphere meets the simplex only at vertices.
        RVector lam = RVector::Zero(d);
        lam(0) = 1.0;
        return Spectrum{lam, 1.0};
    }
    if (p <= 1.0 / d + 1e-15) {
        return detail::uniform_spectrum(d);
    }
    constexpr int kMaxRetries = 10000;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        RVector mu(d);
        double total = 0.0;
        for (int i = 0; i < d; ++i) {
            mu(i) = rng.exponential();
            total += mu(i);
        }
        mu /= total;

        std::vector<int> support(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            support[static_cast<std::size_t>(i)] = i;
        }
        RVector lam = RVector::Zero(d);
        bool solved = false;
        while (support.size() >= 2) {
            const double m = static_cast<double>(support.size());
            const double center = 1.0 / m;
            if (p < center - 1e-12) {
                break; // support shrank past the purity floor; redraw
            }
            double mass = 0.0;
            for (int i : support) {
                mass += mu(i);
            }
            double s2 = 0.0;
            for (int i : support) {
                const double dev = mu(i) / mass - center;
                s2 += dev * dev;
            }
            // A near-uniform direction needs a huge interpolation factor,
            // which amplifies rounding past the sum/purity tolerances.
            if (s2 < 1e-30 || std::max(0.0, p - center) / s2 > 1e8) {
                break; // redraw
            }
            const double t = std::sqrt(std::max(0.0, p - center) / s2);
            double min_val = 0.0;
            for (int i : support) {
                lam(i) = center + t * (mu(i) / mass - center);
                min_val = std::min(min_val, lam(i));
            }
            if (min_val >= -1e-12) {
                double sum = 0.0;
                for (int i : support) {
                    lam(i) = std::max(lam(i), 0.0);
                    sum += lam(i);
                }
                for (int i : support) {
                    lam(i) /= sum;
                }
                solved = true;
                break;
            }
            std::vector<int> kept;
            kept.reserve(support.size());
            for (int i : support) {
                if (lam(i) >= -1e-12) {
                    kept.push_back(i);
                } else {
                    lam(i) = 0.0;
                }
            }
            support = std::move(kept);
        }
        if (solved) {
            Spectrum s{lam, lam.squaredNorm()};
            detail::check_spectrum(s);
            return s;
        }
    }
    throw SamplerExhausted("spectrum_random_at_purity: no admissible draw after " +
                           std::to_string(kMaxRetries) + " retries (d=" + std::to_string(d) +
                           ", P=" + std::to_string(p) + ")");
}

enum class SpectrumMode { two_level, random_simplex };

/// Random real state of fixed purity: O diag(lambda) O^T with Haar O and the
/// selected spectrum sampler. Real-entried by construction.
inline DensityMatrix real_state_at_purity(int d, double p, RngStream& rng, SpectrumMode mode) {
    detail::check_purity_range(d, p, "real_state_at_purity");
    const Spectrum s = mode == SpectrumMode::two_level ? spectrum_two_level(d, p)
                                                       : spectrum_random_at_purity(d, p, rng);
    if (s.lambdas.maxCoeff() == s.lambdas.minCoeff()) {
        // Scalar matrix: conjugation is the identity, keep it exact.
        RMatrix rho = s.lambdas.asDiagonal();
        return validate_density(rho.cast<Complex>());
    }
    const OrthogonalMatrix o = haar_orthogonal(d, rng);
    RMatrix rho = o.mat() * s.lambdas.asDiagonal() * o.mat().transpose();
    rho = 0.5 * (rho + rho.transpose().eval());
    return validate_density(rho.cast<Complex>());
}

/// Uniform draw on the real unit sphere.
inline PureStateVector real_pure_state(int d, RngStream& rng) {
    if (d < 1) {
        throw DimensionTooSmall("real_pure_state: need d >= 1");
    }
    RVector v(d);
    double nrm = 0.0;
    do {
        for (int i = 0; i < d; ++i) {
            v(i) = rng.normal();
        }
        nrm = v.norm();
    } while (nrm < 1e-12);
    v /= nrm;
    return PureStateVector(v.cast<Complex>());
}

/// Channel fixture: k Haar-orthogonal Kraus terms with flat-Dirichlet weights.
inline RealUnitalChannel random_real_unital_channel(int d, int k, RngStream& rng) {
    if (k < 1) {
        throw Error("random_real_unital_channel: need k >= 1");
    }
    std::vector<double> w(static_cast<std::size_t>(k));
    double total = 0.0;
    for (double& wi : w) {
        wi = std::max(rng.exponential(), 1e-300);
        total += wi;
    }
    std::vector<RealUnitalChannel::Term> terms;
    terms.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        terms.push_back({w[static_cast<std::size_t>(i)] / total, haar_orthogonal(d, rng)});
    }
    return RealUnitalChannel(std::move(terms));
}

/// Hilbert-Schmidt random density matrix G G^dag / tr(G G^dag). Test fixture
/// for monotonicity and faithfulness checks on complex states.
inline DensityMatrix random_density_hs(int d, RngStream& rng) {
    if (d < 1) {
        throw DimensionTooSmall("random_density_hs: need d >= 1");
    }
    const CMatrix g = detail::complex_ginibre(d, rng);
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return validate_density(rho);
}

} // namespace igp
