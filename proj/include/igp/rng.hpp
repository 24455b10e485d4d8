#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace igp {

namespace detail {

// SplitMix64 finalizer. Used for seed derivation only, never as the
// sampling generator itself.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Derive an independent sub-seed for a logically separate sampling task
/// (grid rows, paired estimator runs, bootstrap resampling).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return detail::mix64(detail::mix64(seed) ^ detail::mix64(salt ^ 0xA5A5A5A5A5A5A5A5ULL));
}

/// Seeded, stream-addressed random source.
///
/// Contract: the sample sequence is a pure function of (seed, stream).
/// mt19937_64 is fully specified by the standard, uniforms are built from
/// raw 64-bit draws, and normals use Box-Muller on fixed stream positions
/// (two uniforms per pair, no rejection), so replays are bit-identical on
/// one platform and agree to libm accuracy across platforms. Concurrent
/// workers must own distinct stream ids.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed),
          stream_(stream),
          gen_(detail::mix64(detail::mix64(seed) ^ detail::mix64(stream) ^ 0x6A09E667F3BCC909ULL)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal deviate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Exponential deviate with unit rate.
    double exponential() { return -std::log1p(-uniform()); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace igp
