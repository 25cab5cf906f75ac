#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace greenopt {

// Mixing finalizer from the splitmix64 generator. Used to derive independent
// generator seeds from (seed, stream path) tuples.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic stream derivation: the same (seed, path) always yields the
// same generator, regardless of how many draws other streams consumed.
inline std::mt19937_64 derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t w : path)
        h = splitmix64(h ^ (w + 0x9E3779B97F4A7C15ull));
    return std::mt19937_64(h);
}

// Uniform double in [0, 1) with 53 random bits. Not implementation-defined,
// unlike std::uniform_real_distribution.
inline double uniform_unit(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform_real(std::mt19937_64& g, double lo, double hi) {
    return lo + uniform_unit(g) * (hi - lo);
}

// Unbiased integer in [0, n) via rejection.
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = g();
    } while (v >= limit);
    return v % n;
}

// Standard normal via Box-Muller; consumes exactly two draws per call.
inline double normal(std::mt19937_64& g) {
    const double u1 = 1.0 - uniform_unit(g);
    const double u2 = uniform_unit(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace greenopt
