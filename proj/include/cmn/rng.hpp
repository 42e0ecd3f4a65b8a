#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

namespace cmn {

/// Seeded random source. Deviates are derived from the raw 64-bit engine
/// output by fixed transforms, so a given seed yields the same sequence on
/// every standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform real in [0, 1).
  double uniform();
  /// Uniform real in [lo, hi]; returns lo when lo == hi.
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);
  /// Standard normal deviate (Marsaglia polar method).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::optional<double> spare_normal_;
};

}  // namespace cmn
