#pragma once

#include <cstdint>
#include <random>

namespace hra {

/// All randomness flows through explicitly passed engines so that every
/// realization is reproducible from its seed alone.
using Rng = std::mt19937_64;

/// Uniform draw on [0, 1).
inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// splitmix64 step; used to derive independent per-realization seeds from a
/// master seed without correlated low bits.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng make_realization_rng(std::uint64_t master_seed, std::uint64_t realization) {
    return Rng(mix_seed(master_seed + mix_seed(realization + 1)));
}

} // namespace hra
