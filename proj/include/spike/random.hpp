#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace spike {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent per-trial seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for trial `trial` of the sweep cell (n, eta). Depends only on its
/// arguments, so trials can run in any order on any worker.
inline std::uint64_t trial_seed(std::uint64_t base_seed, int n, double eta,
                                std::uint64_t trial) noexcept {
    std::uint64_t h = mix64(base_seed ^ mix64(static_cast<std::uint64_t>(n)));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(eta));
    return mix64(h ^ mix64(trial));
}

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
inline std::complex<double> complex_normal(Rng& rng, double variance = 1.0) {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

}  // namespace spike
