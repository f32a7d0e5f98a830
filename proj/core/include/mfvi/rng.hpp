#ifndef MFVI_RNG_HPP
#define MFVI_RNG_HPP

#include <cstdint>
#include <random>

namespace mfvi {

// SplitMix64 hash step; used for counter-based draws and seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d9d29fbf3437ULL;
    return x ^ (x >> 31);
}

// Deterministic sub-seed for worker/replicate `index` of a run seeded by `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

// Counter-based uniform draw over {0, .., n-1}: the t-th coordinate choice of a
// seeded run is a pure function of (seed, t).
inline int uniform_index(std::uint64_t seed, std::uint64_t counter, int n) {
    return static_cast<int>(splitmix64(splitmix64(seed) ^ counter) % static_cast<std::uint64_t>(n));
}

// Engine for distribution sampling (data generation, Monte Carlo estimates).
inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed ^ 0x5bf0a8dcULL));
}

}  // namespace mfvi

#endif
