#include "cmn/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cmn {

DesignSpace::DesignSpace(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty()) throw ConfigError("DesignSpace: dimension must be at least 1");
  if (lower_.size() != upper_.size()) {
    throw ConfigError("DesignSpace: lower and upper bounds differ in length");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i]) || !std::isfinite(lower_[i]) ||
        !std::isfinite(upper_[i])) {
      std::ostringstream msg;
      msg << "DesignSpace: bounds of dimension " << i << " are not an interval";
      throw ConfigError(msg.str());
    }
  }
}

bool DesignSpace::contains(std::span<const double> point) const {
  if (point.size() != dim()) return false;
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (!(point[i] >= lower_[i] && point[i] <= upper_[i])) return false;
  }
  return true;
}

void DesignSpace::require_contains(std::span<const double> point) const {
  if (point.size() != dim()) {
    throw ContractViolation("point has dimension " + std::to_string(point.size()) +
                            ", design space has " + std::to_string(dim()));
  }
  if (!contains(point)) throw ContractViolation("point lies outside the design space");
}

Genome DesignSpace::clamp(Genome point) const {
  for (std::size_t i = 0; i < point.size(); ++i) {
    point[i] = std::clamp(point[i], lower_[i], upper_[i]);
  }
  return point;
}

Genome DesignSpace::normalize(std::span<const double> point) const {
  require_contains(point);
  Genome out(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    out[i] = (point[i] - lower_[i]) / (upper_[i] - lower_[i]);
  }
  return out;
}

Genome normalize(std::span<const double> point, const DesignSpace& space) {
  return space.normalize(point);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

double distance(std::span<const double> a, std::span<const double> b,
                const DesignSpace& space) {
  return std::sqrt(squared_distance(space.normalize(a), space.normalize(b)));
}

double proximity_from_distance(double d) {
  return d < kProximityEpsilon ? 1.0 / kProximityEpsilon : 1.0 / d;
}

double proximity(std::span<const double> a, std::span<const double> b,
                 const DesignSpace& space) {
  return proximity_from_distance(distance(a, b, space));
}

double raw_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

// --- Archive ---------------------------------------------------------------

namespace {
constexpr std::size_t kMinUnindexedTail = 64;
}

Archive::Archive(DesignSpace space) : space_(std::move(space)) {}

std::span<const double> Archive::normalized(std::size_t id) const {
  return std::span<const double>(coords_).subspan(id * space_.dim(), space_.dim());
}

const Individual& Archive::add(Genome genome, double raw_fitness,
                               std::size_t generation, double insertion_threshold) {
  Genome unit = space_.normalize(genome);
  if (!std::isfinite(raw_fitness)) {
    throw ContractViolation("Archive::add: fitness must be finite");
  }
  coords_.insert(coords_.end(), unit.begin(), unit.end());
  individuals_.push_back(
      Individual{individuals_.size(), std::move(genome), raw_fitness, generation});
  thresholds_.push_back(insertion_threshold);
  maybe_reindex();
  return individuals_.back();
}

void Archive::maybe_reindex() {
  const std::size_t tail = size() - index_.size();
  const auto root = static_cast<std::size_t>(std::sqrt(static_cast<double>(size())));
  if (tail > std::max(kMinUnindexedTail, root)) {
    index_.build(coords_, space_.dim(), size());
  }
}

std::vector<Neighbor> Archive::nearest(std::span<const double> point,
                                       std::size_t k) const {
  return nearest_normalized(space_.normalize(point), k);
}

std::vector<Neighbor> Archive::nearest_normalized(std::span<const double> unit,
                                                  std::size_t k) const {
  if (empty()) throw ContractViolation("nearest-neighbour query on an empty archive");
  const std::size_t want = std::min(k, size());
  std::vector<Neighbor> best;
  best.reserve(want + 1);
  index_.query(coords_, unit, want, best);
  for (std::size_t id = index_.size(); id < size(); ++id) {
    offer_neighbor(best, want, id, squared_distance(unit, normalized(id)));
  }
  for (Neighbor& n : best) n.distance = std::sqrt(n.distance);
  return best;
}

std::vector<Neighbor> k_nearest(const Archive& archive, std::span<const double> point,
                                std::size_t k) {
  return archive.nearest(point, k);
}

}  // namespace cmn
