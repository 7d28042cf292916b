#pragma once

// Seeded randomness with a fixed, platform-independent draw sequence.
// std::uniform_int_distribution and std::shuffle are implementation-defined,
// so everything that must be reproducible goes through these helpers.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace lexboot {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

/// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
inline std::uint64_t bounded(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = Rng::max() - Rng::max() % bound;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % bound;
}

/// Uniform real in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Forward Fisher-Yates: position i is swapped with i + bounded(n - i).
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
    const std::size_t n = values.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded(rng, n - i));
        std::swap(values[i], values[j]);
    }
}

/// First `count` positions of a partial forward Fisher-Yates shuffle of
/// [0, population). Result order is draw order.
inline std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count,
                                               std::uint64_t seed) {
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng = make_rng(seed);
    for (std::size_t i = 0; i < count && i < population; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded(rng, population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(std::min(count, population));
    return idx;
}

}  // namespace lexboot
