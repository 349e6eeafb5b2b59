#pragma once

#include <cstdint>
#include <random>

namespace perclab {

// SplitMix64 finalizer. Used as a stateless 64-bit mixer: per-edge uniforms
// and per-trial seeds are pure functions of their keys, so sampling order
// and worker count never change a configuration.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
    return splitmix64(h ^ splitmix64(v + 0x632BE59BD9B4E019ULL));
}

// 53-bit uniform in [0, 1).
constexpr double to_unit_double(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Stable per-trial seed derived from (master_seed, trial index).
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    return hash_combine(splitmix64(master_seed), index);
}

// Sequential generator for solvers (annealing, random polytopes).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next() { return engine_(); }
    double uniform() { return to_unit_double(engine_()); }
    // Uniform integer in [0, bound); bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
        return dist(engine_);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace perclab
