#pragma once

#include <cstdint>
#include <random>

namespace qka {

// Deterministic random source. All randomness in the simulator flows through
// instances of this class; identical seeds give identical draw sequences on
// every platform, so runs and reports are reproducible bit for bit.
//
// std::mt19937_64 output is fully specified by the standard. The helper draws
// below avoid std::uniform_*_distribution on purpose: those are
// implementation-defined and would break cross-platform determinism.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t raw() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
  }

  int bit() { return static_cast<int>(engine_() >> 63); }

  bool chance(double p) { return uniform() < p; }

  // Independent child stream; (seed, stream) pairs map to distinct seeds via
  // a splitmix64 finalizer.
  RandomSource child(std::uint64_t stream) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return RandomSource(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace qka
