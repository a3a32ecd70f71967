#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "dtc/common.hpp"

namespace dtc {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Derives the seed of a named sub-stream from a root seed. Every stochastic
/// stage of an experiment pulls its own (role, index) stream so whole runs
/// replay bit-identically from one root seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view role, std::uint64_t index = 0) {
    std::uint64_t h = detail::splitmix64(root ^ fnv1a64(role));
    return detail::splitmix64(h ^ (index * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL));
}

/// Seedable generator used throughout. Uniform doubles are produced from the
/// raw 64-bit stream (not std::uniform_real_distribution) so the mapping from
/// seed to values is pinned by this file alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // multiply-shift rejection keeps the draw unbiased
        std::uint64_t x = eng_();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t t = -n % n;
            while (lo < t) {
                x = eng_();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    long long binomial(long long n, double p) {
        if (n <= 0 || p <= 0.0) return 0;
        if (p >= 1.0) return n;
        std::binomial_distribution<long long> dist(n, p);
        return dist(eng_);
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

}  // namespace dtc
