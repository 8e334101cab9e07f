#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace rankstab {

/// Engine used for every random draw in the toolkit. Its output sequence is
/// fixed by the standard, unlike the std distributions, so all draws below
/// are built directly on the raw 64-bit output.
using RandomEngine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for split `index` derived from the master seed:
///   seed_r = mix64(master ^ mix64(r + 1))
/// Each split is reproducible on its own, independent of the others.
constexpr std::uint64_t derive_split_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(master ^ mix64(index + 1));
}

/// Uniform integer in [0, bound) by rejection (bound > 0).
inline std::uint64_t uniform_below(RandomEngine& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(RandomEngine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    RandomEngine rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

} // namespace rankstab
