#pragma once

#include <cstdint>
#include <random>

namespace grnea {

/// All randomness in the project flows through seeded mt19937_64 engines so a
/// single run seed reproduces every stage byte for byte. Sub-streams are
/// derived by mixing a stage tag into the root seed.
using Rng = std::mt19937_64;

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    // splitmix64 finalizer over seed^tag
    std::uint64_t z = seed ^ (tag * 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t tag = 0) { return Rng(mix_seed(seed, tag)); }

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

}  // namespace grnea
