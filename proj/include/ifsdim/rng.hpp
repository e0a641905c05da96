#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ifsdim {

// Counter-based deterministic RNG (splitmix64 core). Every Monte Carlo
// sample gets its own stream derived from (master seed, sample index), so
// results do not depend on thread scheduling or worker count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng stream(std::uint64_t master_seed, std::uint64_t index) {
        // Two mixing rounds decorrelate adjacent indices.
        std::uint64_t s = mix(master_seed ^ mix(index + 0x9E3779B97F4A7C15ULL));
        return Rng(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + uniform() * (b - a); }

    // Index into a discrete distribution given by weights (need not be
    // normalized). Deterministic inverse-CDF walk.
    std::size_t pick(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30; z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27; z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

} // namespace ifsdim
