#pragma once

#include <cstdint>
#include <random>

namespace commsim {

/// splitmix64 step; used only to derive well-separated seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic 64-bit seed for stream `index` under `base_seed`.
/// Streams for distinct indices are decorrelated; the mapping is fixed
/// so that any trial can be reproduced in isolation.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
    std::uint64_t s = base_seed;
    splitmix64(s);
    s ^= 0xD6E8FEB86659FD93ULL * (index + 1);
    std::uint64_t out = splitmix64(s);
    out ^= splitmix64(s);
    return out;
}

/// The engine used everywhere: mt19937_64 output is fixed by the standard,
/// so runs reproduce across compilers.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t base_seed, std::uint64_t index) {
    return Rng(derive_seed(base_seed, index));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1); safe as a log() argument.
inline double uniform01_open(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace commsim
