#pragma once

#include "tvglasso/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tvglasso {

using Rng = std::mt19937_64;

// splitmix64 step; used to derive independent per-task seeds so that
// concurrent execution order cannot perturb results
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t task) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (task + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double uniform01(Rng& rng) {
    // 53-bit mantissa, platform-independent
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; deterministic across platforms unlike std::normal_distribution
inline double normal_sample(Rng& rng) {
    double u1 = 0.0;
    do {
        u1 = uniform01(rng);
    } while (u1 <= 0.0);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

template <typename Scalar = double>
MatrixX<Scalar> gaussian_matrix(Index rows, Index cols, Rng& rng) {
    MatrixX<Scalar> m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = static_cast<Scalar>(normal_sample(rng));
    return m;
}

// k distinct indices drawn from [0, n) without replacement (partial Fisher-Yates)
inline std::vector<Index> sample_without_replacement(Index n, Index k, Rng& rng) {
    std::vector<Index> pool(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (Index i = 0; i < k; ++i) {
        const Index j = i + static_cast<Index>(rng() % static_cast<std::uint64_t>(n - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    return pool;
}

}  // namespace tvglasso
