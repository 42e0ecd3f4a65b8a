#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cmn/core.hpp"
#include "cmn/rng.hpp"

namespace cmn {

/// Fitness-proportionate selection over a fixed weight vector. Weights must
/// be non-negative; an all-zero vector selects uniformly.
class FpsSampler {
 public:
  explicit FpsSampler(std::span<const double> weights);

  std::size_t size() const { return cumulative_.size(); }
  std::size_t sample(RngStream& rng) const;

 private:
  std::vector<double> cumulative_;
};

std::size_t select_fps(std::span<const double> weights, RngStream& rng);

/// Offspring drawn uniformly from the box spanned by the two parents.
Genome crossover_hypercube(std::span<const double> p1, std::span<const double> p2,
                           RngStream& rng);

/// Adds N(0, (sigma * extent_i)^2) to each component, then clamps to bounds.
Genome mutate_gaussian(std::span<const double> parent, double sigma,
                       const DesignSpace& space, RngStream& rng);

}  // namespace cmn
