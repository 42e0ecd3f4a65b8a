#include "cmn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cmn {
namespace {

void require_inputs(std::span<const Individual> individuals, const ReferenceOptima& optima) {
  if (individuals.empty()) throw ContractViolation("convergence metric of an empty population");
  if (optima.points.empty()) throw ContractViolation("convergence metric without optima");
}

PeakStatus nearest_to(std::span<const double> point, std::span<const Individual> individuals) {
  PeakStatus status{false, std::numeric_limits<double>::infinity(), 0};
  for (const Individual& ind : individuals) {
    const double d = raw_distance(point, ind.genome);
    if (d < status.distance) {
      status.distance = d;
      status.nearest_id = ind.id;
    }
  }
  return status;
}

}  // namespace

void ConvergenceTrace::record(const TracePoint& point) {
  if (!points.empty() && point.evals <= points.back().evals) {
    throw ContractViolation("trace evaluation counts must strictly increase");
  }
  if (!(point.metric_raw >= 0.0 && point.metric_normalized >= 0.0 &&
        point.metric_reported >= 0.0)) {
    throw ContractViolation("trace metrics must be non-negative");
  }
  points.push_back(point);
}

double convergence_metric(std::span<const Individual> individuals,
                          const ReferenceOptima& optima) {
  return convergence_metric_excluding(individuals, optima, {});
}

double convergence_metric_normalized(std::span<const Individual> individuals,
                                     const ReferenceOptima& optima,
                                     const DesignSpace& space) {
  require_inputs(individuals, optima);
  const std::size_t dim = space.dim();
  std::vector<double> units;
  units.reserve(individuals.size() * dim);
  for (const Individual& ind : individuals) {
    const Genome unit = space.normalize(ind.genome);
    units.insert(units.end(), unit.begin(), unit.end());
  }
  double sum = 0.0;
  for (const Genome& point : optima.points) {
    const Genome unit = space.normalize(point);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < individuals.size(); ++i) {
      best = std::min(best, squared_distance(unit, std::span<const double>(units).subspan(i * dim, dim)));
    }
    sum += std::sqrt(best);
  }
  return sum;
}

double convergence_metric_excluding(std::span<const Individual> individuals,
                                    const ReferenceOptima& optima,
                                    std::span<const std::size_t> excluded) {
  require_inputs(individuals, optima);
  std::vector<bool> skip(optima.points.size(), false);
  for (std::size_t j : excluded) {
    if (j >= skip.size()) throw ContractViolation("excluded optimum index out of range");
    skip[j] = true;
  }
  if (std::all_of(skip.begin(), skip.end(), [](bool s) { return s; })) {
    throw ContractViolation("cannot exclude every reference optimum");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < optima.points.size(); ++j) {
    if (!skip[j]) sum += nearest_to(optima.points[j], individuals).distance;
  }
  return sum;
}

std::size_t PeakReport::found_count() const {
  return static_cast<std::size_t>(
      std::count_if(peaks.begin(), peaks.end(), [](const PeakStatus& p) { return p.found; }));
}

PeakReport peak_report(std::span<const Individual> individuals, const ReferenceOptima& optima) {
  require_inputs(individuals, optima);
  PeakReport report;
  for (std::size_t j = 0; j < optima.points.size(); ++j) {
    PeakStatus status = nearest_to(optima.points[j], individuals);
    const double radius = j < optima.radii.size() ? optima.radii[j] : 0.0;
    status.found = status.distance <= radius;
    report.peaks.push_back(status);
  }
  return report;
}

std::optional<std::size_t> evals_to_threshold(const ConvergenceTrace& trace, double threshold) {
  if (!(threshold > 0.0)) throw ContractViolation("evals_to_threshold: threshold must be positive");
  for (const TracePoint& p : trace.points) {
    if (p.metric_raw <= threshold) return p.evals;
  }
  return std::nullopt;
}

MetricFn make_metric(ReferenceOptima optima, DesignSpace space,
                     std::vector<std::size_t> reported_excludes) {
  return [optima = std::move(optima), space = std::move(space),
          excludes = std::move(reported_excludes)](std::span<const Individual> individuals) {
    MetricSample sample;
    sample.raw = convergence_metric(individuals, optima);
    sample.normalized = convergence_metric_normalized(individuals, optima, space);
    sample.reported = excludes.empty()
                          ? sample.raw
                          : convergence_metric_excluding(individuals, optima, excludes);
    return sample;
  };
}

}  // namespace cmn
