#ifndef OSC_ISING_RANDOM_HPP
#define OSC_ISING_RANDOM_HPP

#include <cstdint>
#include <random>

namespace osc_ising {

// std::uniform_*_distribution output differs between standard libraries; these helpers
// only rely on the bit-exact mt19937_64 sequence so seeded runs reproduce everywhere.

using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
inline std::uint64_t uniform_index(Rng &rng, std::uint64_t bound) {
    const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t combine_seeds(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

}  // namespace osc_ising

#endif  // OSC_ISING_RANDOM_HPP
