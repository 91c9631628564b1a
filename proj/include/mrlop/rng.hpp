#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mrlop {

// Deterministic RNG used everywhere in the framework. Wraps mt19937_64 and
// keeps all variate transforms in-house so streams are bit-stable across
// platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n), n > 0
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n));
    }

    // Box-Muller, cosine branch only so one draw costs exactly two uniforms.
    double normal(double mean, double stddev) {
        double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    double cauchy(double location, double scale) {
        double u = uniform();
        return location + scale * std::tan(std::numbers::pi * (u - 0.5));
    }

    std::uint64_t next_u64() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

// SplitMix64 finalizer; used to derive independent child seeds from a master
// seed plus a stream tag without correlated streams.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return mix_seed(a ^ mix_seed(b));
}

}  // namespace mrlop
