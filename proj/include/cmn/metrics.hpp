#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmn/core.hpp"
#include "cmn/objectives.hpp"

namespace cmn {

struct TracePoint {
  std::size_t generation = 0;
  std::size_t evals = 0;
  double metric_raw = 0.0;
  double metric_normalized = 0.0;
  // Metric used for plotting; differs from metric_raw only when peaks are
  // excluded. Not part of the trace file.
  double metric_reported = 0.0;
};

/// (evaluation count, convergence metric) series of one run.
struct ConvergenceTrace {
  std::size_t run = 0;
  std::string algorithm;
  std::string objective;
  std::uint64_t seed = 0;
  std::vector<TracePoint> points;

  /// Appends a point; evaluation counts must strictly increase.
  void record(const TracePoint& point);
};

/// Sum over reference optima of the raw-unit distance to the nearest
/// individual. Throws ContractViolation if either side is empty.
double convergence_metric(std::span<const Individual> individuals,
                          const ReferenceOptima& optima);
/// Same sum with distances measured in the unit hypercube of `space`.
double convergence_metric_normalized(std::span<const Individual> individuals,
                                     const ReferenceOptima& optima,
                                     const DesignSpace& space);
/// Sum over the optima whose indices are not listed in `excluded`.
double convergence_metric_excluding(std::span<const Individual> individuals,
                                    const ReferenceOptima& optima,
                                    std::span<const std::size_t> excluded);

struct PeakStatus {
  bool found = false;
  double distance = 0.0;  // raw units
  std::size_t nearest_id = 0;
};

struct PeakReport {
  std::vector<PeakStatus> peaks;

  std::size_t found_count() const;
};

PeakReport peak_report(std::span<const Individual> individuals,
                       const ReferenceOptima& optima);

/// Smallest evaluation count at which metric_raw <= threshold.
std::optional<std::size_t> evals_to_threshold(const ConvergenceTrace& trace,
                                              double threshold);

struct MetricSample {
  double raw = 0.0;
  double normalized = 0.0;
  double reported = 0.0;
};

using MetricFn = std::function<MetricSample(std::span<const Individual>)>;

/// Metric callback over a fixed optimum set. `reported_excludes` lists optima
/// left out of the reported column.
MetricFn make_metric(ReferenceOptima optima, DesignSpace space,
                     std::vector<std::size_t> reported_excludes = {});

}  // namespace cmn
