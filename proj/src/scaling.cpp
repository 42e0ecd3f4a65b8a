#include "cmn/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cmn {
namespace {

constexpr double kMinExponent = 0.1;
constexpr double kMaxExponent = 10.0;

// Shared by scale_linear and the per-optimum scaling so that an optimum at
// the global maximum reproduces scale_linear bit for bit.
double unit_scale(double raw, double lo, double hi) {
  if (!(hi > lo)) return 0.5;
  return std::clamp((raw - lo) / (hi - lo), 0.0, 1.0);
}

double apply_exponent(double value, double exponent) {
  return exponent == 1.0 ? value : std::pow(value, exponent);
}

}  // namespace

std::vector<double> scale_linear(std::span<const double> raw) {
  if (raw.empty()) return {};
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = unit_scale(raw[i], *lo, *hi);
  return out;
}

double lower_median(std::span<const double> values) {
  if (values.empty()) throw ContractViolation("median of an empty sequence");
  std::vector<double> copy(values.begin(), values.end());
  const auto mid = copy.begin() + static_cast<std::ptrdiff_t>((copy.size() - 1) / 2);
  std::nth_element(copy.begin(), mid, copy.end());
  return *mid;
}

double median_exponent(double median) {
  if (median <= 0.0) return kMinExponent;
  if (median >= 1.0) return kMaxExponent;
  return std::log(0.5) / std::log(median);
}

std::vector<double> scale_median_exponent(std::span<const double> linear) {
  if (linear.empty()) return {};
  const double exponent = median_exponent(lower_median(linear));
  std::vector<double> out(linear.size());
  for (std::size_t i = 0; i < linear.size(); ++i) {
    out[i] = apply_exponent(linear[i], exponent);
  }
  return out;
}

std::vector<std::size_t> detect_local_optima(const Archive& archive, std::size_t n_min) {
  if (archive.empty()) throw ContractViolation("local optima of an empty archive");
  std::vector<std::size_t> optima;
  for (std::size_t i = 0; i < archive.size(); ++i) {
    const double fitness = archive[i].raw_fitness;
    const auto neighbours = archive.nearest_normalized(archive.normalized(i), n_min + 1);
    bool optimum = true;
    std::size_t compared = 0;
    for (const Neighbor& n : neighbours) {
      if (n.id == i) continue;
      if (compared++ == n_min) break;
      const double other = archive[n.id].raw_fitness;
      if (other > fitness || (other == fitness && n.id < i)) {
        optimum = false;
        break;
      }
    }
    if (optimum) optima.push_back(i);
  }
  return optima;
}

FitnessScaling FitnessScaling::fit(const Archive& archive,
                                   std::span<const std::size_t> optima) {
  if (archive.empty()) throw ContractViolation("fitness scaling of an empty archive");
  FitnessScaling model;
  std::vector<double> raw(archive.size());
  for (std::size_t i = 0; i < archive.size(); ++i) raw[i] = archive[i].raw_fitness;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  model.min_ = *lo;
  model.max_ = *hi;
  model.global_exponent_ = median_exponent(lower_median(scale_linear(raw)));

  std::vector<double> column(raw.size());
  for (std::size_t id : optima) {
    Anchor anchor{id, Genome(archive.normalized(id).begin(), archive.normalized(id).end()),
                  archive[id].raw_fitness, 1.0};
    for (std::size_t i = 0; i < raw.size(); ++i) {
      column[i] = unit_scale(raw[i], model.min_, anchor.fitness);
    }
    anchor.exponent = median_exponent(lower_median(column));
    model.anchors_.push_back(std::move(anchor));
  }
  return model;
}

double FitnessScaling::linear(double raw) const { return unit_scale(raw, min_, max_); }

double FitnessScaling::median_adjusted(double raw) const {
  return apply_exponent(linear(raw), global_exponent_);
}

double FitnessScaling::anchored_value(const Anchor& anchor, double raw) const {
  return apply_exponent(unit_scale(raw, min_, anchor.fitness), anchor.exponent);
}

double FitnessScaling::final_value(std::span<const double> unit, double raw) const {
  if (anchors_.empty()) return median_adjusted(raw);
  if (anchors_.size() == 1) return anchored_value(anchors_.front(), raw);
  double weighted = 0.0;
  double weights = 0.0;
  for (const Anchor& anchor : anchors_) {
    const double d = std::sqrt(squared_distance(unit, anchor.unit));
    if (d < kProximityEpsilon) return anchored_value(anchor, raw);
    const double w = 1.0 / d;
    weighted += w * anchored_value(anchor, raw);
    weights += w;
  }
  return std::clamp(weighted / weights, 0.0, 1.0);
}

ScaledFitnessView FitnessScaling::apply(const Archive& archive) const {
  ScaledFitnessView view;
  view.linear.reserve(archive.size());
  view.median_adjusted.reserve(archive.size());
  view.final.reserve(archive.size());
  for (std::size_t i = 0; i < archive.size(); ++i) {
    const double raw = archive[i].raw_fitness;
    view.linear.push_back(linear(raw));
    view.median_adjusted.push_back(median_adjusted(raw));
    view.final.push_back(final_value(archive.normalized(i), raw));
  }
  return view;
}

std::vector<double> scale_proximity_weighted(const Archive& archive,
                                             std::span<const std::size_t> optima) {
  return FitnessScaling::fit(archive, optima).apply(archive).final;
}

}  // namespace cmn
