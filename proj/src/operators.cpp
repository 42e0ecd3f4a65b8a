#include "cmn/operators.hpp"

#include <algorithm>
#include <cmath>

namespace cmn {

FpsSampler::FpsSampler(std::span<const double> weights) {
  if (weights.empty()) throw ContractViolation("FPS over an empty population");
  cumulative_.reserve(weights.size());
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ContractViolation("FPS weights must be finite and non-negative");
    }
    total += w;
    cumulative_.push_back(total);
  }
}

std::size_t FpsSampler::sample(RngStream& rng) const {
  const double total = cumulative_.back();
  if (total <= 0.0) return rng.index(cumulative_.size());
  const double target = rng.uniform() * total;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) {
    // target rounded up to the total: take the last non-empty slot.
    it = std::lower_bound(cumulative_.begin(), cumulative_.end(), total);
  }
  return static_cast<std::size_t>(it - cumulative_.begin());
}

std::size_t select_fps(std::span<const double> weights, RngStream& rng) {
  return FpsSampler(weights).sample(rng);
}

Genome crossover_hypercube(std::span<const double> p1, std::span<const double> p2,
                           RngStream& rng) {
  if (p1.size() != p2.size()) throw ContractViolation("parents differ in dimension");
  Genome child(p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    child[i] = rng.uniform(std::min(p1[i], p2[i]), std::max(p1[i], p2[i]));
  }
  return child;
}

Genome mutate_gaussian(std::span<const double> parent, double sigma,
                       const DesignSpace& space, RngStream& rng) {
  space.require_contains(parent);
  Genome child(parent.begin(), parent.end());
  for (std::size_t i = 0; i < child.size(); ++i) {
    child[i] += sigma * space.extent(i) * rng.normal();
  }
  return space.clamp(std::move(child));
}

}  // namespace cmn
