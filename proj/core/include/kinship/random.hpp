#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace kinship {

// Thin mt19937_64 wrapper. The distributions are hand-rolled because the
// std ones are implementation-defined; fixture generation and the oracle
// suite must replay identically from a seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi);

    // Index drawn proportionally to the (nonnegative) weights.
    std::size_t categorical(const std::vector<double>& weights);

    bool bernoulli(double p) { return uniform01() < p; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace kinship
