#pragma once

#include <cmath>
#include <cstdint>

namespace pano {

// Deterministic RNG used everywhere randomness is needed (RANSAC sampling,
// synthetic noise). SplitMix64 core: identical sequences on every platform,
// cheap to derive independent streams from a seed.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    // Independent stream k of a base seed (per-iteration RANSAC streams).
    static Rng stream(uint64_t seed, uint64_t k) {
        Rng r(seed ^ (0x9E3779B97F4A7C15ull * (k + 1)));
        r.next_u64();
        return r;
    }

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform index in [0, n).
    size_t next_index(size_t n) { return static_cast<size_t>(next_u64() % n); }

    // Standard normal via Box-Muller.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace pano
