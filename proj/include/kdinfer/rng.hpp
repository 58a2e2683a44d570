#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kdinfer {

// Seeded random stream with a pinned algorithm. Simulated fixtures must be
// reproducible from (seed, stream) alone, so the generator identity and the
// variate transforms are part of the output contract:
//   engine:   std::mt19937_64 (bit-specified by the standard)
//   substream seeding: splitmix64(seed ^ splitmix64(stream))
//   uniform01: ((x >> 11) + 1) * 2^-53, in (0, 1]
//   normal:   Box-Muller, two uniforms per variate, no caching
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream)
        : engine_(splitmix64(seed ^ splitmix64(stream))) {}

    /// Uniform on (0, 1]. Never returns 0, so log(u) is always finite.
    double uniform01() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (uniform01() - 0x1.0p-53);
    }

    double normal(double mean, double sd) {
        double u1 = uniform01();
        double u2 = uniform01();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
        return mean + sd * z;
    }

    bool bernoulli(double p) { return uniform01() - 0x1.0p-53 < p; }

    std::uint64_t bits() { return engine_(); }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace kdinfer
