#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmn/kd_index.hpp"

namespace cmn {

/// Raised when a caller breaks a documented precondition (e.g. a point
/// outside the design space).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised for invalid algorithm or run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Genome = std::vector<double>;

/// Distances below this are treated as coincident; proximity is capped at
/// its reciprocal.
inline constexpr double kProximityEpsilon = 1e-12;

/// Box-bounded continuous search space. All distances in the library are
/// measured after mapping the box onto the unit hypercube.
class DesignSpace {
 public:
  DesignSpace(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const { return lower_.size(); }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }
  double lower(std::size_t i) const { return lower_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }
  double extent(std::size_t i) const { return upper_[i] - lower_[i]; }

  bool contains(std::span<const double> point) const;
  /// Throws ContractViolation unless the point has the right dimension and
  /// lies inside the bounds.
  void require_contains(std::span<const double> point) const;
  Genome clamp(Genome point) const;
  Genome normalize(std::span<const double> point) const;

  bool operator==(const DesignSpace&) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

struct Individual {
  std::size_t id = 0;
  Genome genome;
  double raw_fitness = 0.0;
  std::size_t birth_generation = 0;
};

Genome normalize(std::span<const double> point, const DesignSpace& space);

/// Squared Euclidean distance between two already-normalized points.
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Euclidean distance between a and b in normalized coordinates.
double distance(std::span<const double> a, std::span<const double> b,
                const DesignSpace& space);

/// Inverse distance, capped at 1 / kProximityEpsilon for coincident points.
double proximity_from_distance(double d);
double proximity(std::span<const double> a, std::span<const double> b,
                 const DesignSpace& space);

/// Plain Euclidean distance in raw units.
double raw_distance(std::span<const double> a, std::span<const double> b);

/// The cumulative population. Individuals are appended, never removed, and
/// their ids equal their insertion position.
class Archive {
 public:
  explicit Archive(DesignSpace space);

  const DesignSpace& space() const { return space_; }
  std::size_t size() const { return individuals_.size(); }
  bool empty() const { return individuals_.empty(); }

  const Individual& operator[](std::size_t id) const { return individuals_[id]; }
  std::span<const Individual> individuals() const { return individuals_; }
  /// The admission threshold in force when the individual was added
  /// (normalized units; zero for the initial population).
  double insertion_threshold(std::size_t id) const { return thresholds_[id]; }
  std::span<const double> insertion_thresholds() const { return thresholds_; }
  std::span<const double> normalized(std::size_t id) const;

  const Individual& add(Genome genome, double raw_fitness,
                        std::size_t generation, double insertion_threshold = 0.0);

  /// The min(k, size) members closest to `point`, ascending by distance with
  /// ties broken by lower id. Throws ContractViolation on an empty archive.
  std::vector<Neighbor> nearest(std::span<const double> point, std::size_t k) const;
  std::vector<Neighbor> nearest_normalized(std::span<const double> normalized_point,
                                           std::size_t k) const;

 private:
  void maybe_reindex();

  DesignSpace space_;
  std::vector<Individual> individuals_;
  std::vector<double> thresholds_;
  std::vector<double> coords_;  // normalized genomes, row-major
  KdIndex index_;
};

/// Free-function form of Archive::nearest.
std::vector<Neighbor> k_nearest(const Archive& archive, std::span<const double> point,
                                std::size_t k);

}  // namespace cmn
