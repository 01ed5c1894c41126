#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace kfp::rng {

// Counter-based draws: every random number is a pure function of a 64-bit
// key assembled from (seed, replicate, particle, step, slot). No generator
// state, so streams are reproducible and order-independent.

// splitmix64 finalizer
inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t key2(std::uint64_t a, std::uint64_t b) {
    return mix(a ^ (0x9E3779B97F4A7C15ull + (b << 1)));
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0, std::uint64_t d = 0) {
    std::uint64_t h = mix(seed);
    h = key2(h, a);
    h = key2(h, b);
    h = key2(h, c);
    h = key2(h, d);
    return h;
}

// uniform in (0, 1]
inline double uniform01(std::uint64_t k) {
    return (static_cast<double>(mix(k) >> 11) + 1.0) * 0x1.0p-53;
}

// one standard normal (Box-Muller, cosine branch)
inline double normal(std::uint64_t k) {
    double u1 = uniform01(key2(k, 0x517CC1B727220A95ull));
    double u2 = uniform01(key2(k, 0x2545F4914F6CDD1Dull));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace kfp::rng
