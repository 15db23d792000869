#pragma once

#include <cstdint>
#include <cmath>
#include <random>

#include "specml/grid.hpp"

namespace specml {

/// Deterministic random source: mt19937_64 with Box-Muller normals.
/// Identical seeds give identical streams within one build; independent
/// streams are derived by seed mixing rather than by sharing state.
class Rng {
  public:
    explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

    uint64_t seed() const { return seed_; }

    double uniform() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        // Box-Muller, cosine branch only: one normal per uniform pair.
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    /// Normal with the given stddev, resampled until within cut stddevs.
    double truncated_normal(double stddev, double cut = 2.0) {
        double z = normal();
        while (std::abs(z) > cut) z = normal();
        return stddev * z;
    }

    uint64_t next_u64() { return engine_(); }

    /// Independent stream for a subtask (sample index, training step, ...).
    Rng derive(uint64_t stream) const {
        return Rng(mix(seed_ ^ mix(stream + 0x9e3779b97f4a7c15ull)));
    }

  private:
    static uint64_t mix(uint64_t x) {  // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace specml
