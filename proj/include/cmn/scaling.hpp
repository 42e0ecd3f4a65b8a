#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cmn/core.hpp"

namespace cmn {

/// Per-individual scaled fitness, aligned to archive ids. Recomputed from raw
/// fitness every generation.
struct ScaledFitnessView {
  std::vector<double> linear;           // min-max scaled to [0, 1]
  std::vector<double> median_adjusted;  // power-scaled so the median is 0.5
  std::vector<double> final;            // proximity-weighted over local optima

  std::size_t size() const { return final.size(); }
};

/// Min-max scaling to [0, 1]. All-equal input maps to 0.5 everywhere.
std::vector<double> scale_linear(std::span<const double> raw);

/// Lower median: element (n - 1) / 2 of the sorted values. For even n this
/// keeps median(x^e) == median(x)^e under any monotone power.
double lower_median(std::span<const double> values);

/// ln(0.5) / ln(median). A median of 0 clamps to 0.1 and a median of 1 to 10.
double median_exponent(double median);

/// Raises each value to median_exponent(lower_median(values)).
std::vector<double> scale_median_exponent(std::span<const double> linear);

/// Ids of individuals fitter than all of their n_min nearest neighbours.
/// Equal raw fitness counts in favour of the lower id.
std::vector<std::size_t> detect_local_optima(const Archive& archive, std::size_t n_min);

/// Fitness scaling fitted to an archive snapshot and a set of local optima.
/// Every optimum anchors its own min-max scaling, with the optimum's fitness
/// as the maximum; an individual's final value blends the per-optimum values
/// weighted by proximity to each optimum.
class FitnessScaling {
 public:
  FitnessScaling() = default;

  static FitnessScaling fit(const Archive& archive, std::span<const std::size_t> optima);

  double linear(double raw) const;
  double median_adjusted(double raw) const;
  /// Scaled value for an arbitrary point (normalized coordinates) with the
  /// given raw fitness; used for archive members and newcomers alike.
  double final_value(std::span<const double> unit, double raw) const;

  ScaledFitnessView apply(const Archive& archive) const;
  std::size_t optimum_count() const { return anchors_.size(); }

 private:
  struct Anchor {
    std::size_t id = 0;
    Genome unit;
    double fitness = 0.0;
    double exponent = 1.0;
  };

  double anchored_value(const Anchor& anchor, double raw) const;

  double min_ = 0.0;
  double max_ = 0.0;
  double global_exponent_ = 1.0;
  std::vector<Anchor> anchors_;
};

/// Proximity-weighted scaled fitness of every archive member.
std::vector<double> scale_proximity_weighted(const Archive& archive,
                                             std::span<const std::size_t> optima);

}  // namespace cmn
