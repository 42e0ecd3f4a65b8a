#include "cmn/objectives.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmn {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEnvelopeCenter = 0.0667;
constexpr double kEnvelopeWidth = 0.64;
constexpr std::array<double, 5> kFoxholeGrid{-32.0, -16.0, 0.0, 16.0, 32.0};

void require_interval(double v, double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi)) {
    throw ContractViolation(std::string(what) + ": argument outside the domain");
  }
}

double pow6(double v) {
  const double sq = v * v;
  return sq * sq * sq;
}

double envelope(double x) {
  const double dx = x - kEnvelopeCenter;
  return std::exp(-4.0 * std::numbers::ln2 * dx * dx / kEnvelopeWidth);
}

// The hole at grid row r, column c is hole number 5 r + c (row-major, A varies
// fastest); `index` is that number plus one.
double foxhole_offset(FoxholesForm form, std::size_t index) {
  return form == FoxholesForm::kLiteral ? 1.0 : static_cast<double>(index);
}

// Partial derivatives used to locate maxima precisely. The foxhole peaks are
// flat to sixth order, so value comparisons alone cannot pin them down.
double f2_derivative(double x) {
  const double u = 5.1 * kPi * x + 0.5;
  const double s = std::sin(u);
  const double sin6 = pow6(s);
  const double dsin6 = 6.0 * s * s * s * s * s * std::cos(u) * 5.1 * kPi;
  const double g = envelope(x);
  const double dg = g * (-8.0 * std::numbers::ln2 * (x - kEnvelopeCenter) / kEnvelopeWidth);
  return dg * sin6 + g * dsin6;
}

double f3_partial(double x, double y, std::size_t dim, FoxholesForm form) {
  double sum = 0.0;
  std::size_t index = 1;
  for (double b : kFoxholeGrid) {
    for (double a : kFoxholeGrid) {
      const double den = foxhole_offset(form, index) + pow6(x - a) + pow6(y - b);
      const double d = dim == 0 ? x - a : y - b;
      sum += -6.0 * d * d * d * d * d / (den * den);
      ++index;
    }
  }
  return sum;
}

double f4_partial(double x, double y, std::size_t dim) {
  double sum = 0.0;
  for (const PeakSpec& p : kIrregularPeaks) {
    const double dx = x - p.a;
    const double dy = y - p.b;
    const double den = 1.0 + p.width * (dx * dx + dy * dy);
    sum += -2.0 * p.height * p.width * (dim == 0 ? dx : dy) / (den * den);
  }
  return sum;
}

// Root of a decreasing derivative on [lo, hi] by bisection.
template <typename Derivative>
double bisect_root(Derivative&& derivative, double lo, double hi) {
  for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (derivative(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Coordinate-wise stationary-point search from `seed`: each sweep solves
// d/dx_i = 0 by bisection inside [seed_i - half_width, seed_i + half_width].
template <typename Partial>
Genome refine_2d(Partial&& partial, Genome seed, double half_width) {
  Genome point = seed;
  for (int sweep = 0; sweep < 500; ++sweep) {
    double moved = 0.0;
    for (std::size_t d = 0; d < 2; ++d) {
      auto along = [&](double v) {
        Genome probe = point;
        probe[d] = v;
        return partial(probe[0], probe[1], d);
      };
      const double updated =
          bisect_root(along, seed[d] - half_width, seed[d] + half_width);
      moved = std::max(moved, std::abs(updated - point[d]));
      point[d] = updated;
    }
    if (moved < 1e-14) break;
  }
  return point;
}

}  // namespace

double f1(double x) {
  require_interval(x, 0.0, 1.0, "f1");
  return pow6(std::sin(5.1 * kPi * x + 0.5));
}

double f2(double x) {
  require_interval(x, 0.0, 1.0, "f2");
  return envelope(x) * f1(x);
}

double f3(double x, double y, FoxholesForm form) {
  require_interval(x, -65.536, 65.536, "f3");
  require_interval(y, -65.536, 65.536, "f3");
  double sum = 0.002;
  std::size_t index = 1;
  for (double b : kFoxholeGrid) {
    for (double a : kFoxholeGrid) {
      sum += 1.0 / (foxhole_offset(form, index) + pow6(x - a) + pow6(y - b));
      ++index;
    }
  }
  return sum;
}

double f4(double x, double y) {
  require_interval(x, -40.0, 40.0, "f4");
  require_interval(y, -40.0, 40.0, "f4");
  double sum = 0.0;
  for (const PeakSpec& p : kIrregularPeaks) {
    const double dx = x - p.a;
    const double dy = y - p.b;
    sum += p.height / (1.0 + p.width * (dx * dx + dy * dy));
  }
  return sum;
}

// --- Objective -------------------------------------------------------------

Objective::Objective(std::string name, DesignSpace space, ObjectiveFn fn)
    : name_(std::move(name)), space_(std::move(space)), fn_(std::move(fn)) {
  if (!fn_) throw ConfigError("Objective '" + name_ + "' has no evaluation callback");
}

double Objective::evaluate(std::span<const double> x) {
  space_.require_contains(x);
  ++eval_count_;
  const double value = fn_(x);
  if (!std::isfinite(value)) {
    throw std::runtime_error("objective '" + name_ + "' returned a non-finite value");
  }
  return value;
}

Objective counting_wrapper(const Objective& objective) {
  Objective copy = objective;
  copy.eval_count_ = 0;
  return copy;
}

DesignSpace benchmark_space(const std::string& name) {
  if (name == "F1" || name == "F2") return DesignSpace({0.0}, {1.0});
  if (name == "F3") return DesignSpace({-65.536, -65.536}, {65.536, 65.536});
  if (name == "F4") return DesignSpace({-40.0, -40.0}, {40.0, 40.0});
  throw ConfigError("unknown objective '" + name + "'");
}

Objective make_benchmark(const std::string& name, ObjectiveOptions options) {
  DesignSpace space = benchmark_space(name);
  if (name == "F1") {
    return Objective(name, space, [](std::span<const double> x) { return f1(x[0]); });
  }
  if (name == "F2") {
    return Objective(name, space, [](std::span<const double> x) { return f2(x[0]); });
  }
  if (name == "F3") {
    return Objective(name, space, [form = options.foxholes](std::span<const double> x) {
      return f3(x[0], x[1], form);
    });
  }
  return Objective(name, space, [](std::span<const double> x) { return f4(x[0], x[1]); });
}

ReferenceOptima reference_optima(const std::string& name, ObjectiveOptions options) {
  ReferenceOptima optima;
  if (name == "F1" || name == "F2") {
    for (int k = 0; k < 5; ++k) {
      const double analytic = (kPi / 2.0 + k * kPi - 0.5) / (5.1 * kPi);
      double x = analytic;
      if (name == "F2") {
        // Bracket: half a period is 0.098, the envelope shift is far smaller.
        x = bisect_root(f2_derivative, std::max(0.0, analytic - 0.05), analytic + 0.05);
      }
      optima.points.push_back({x});
      optima.radii.push_back(0.01);
    }
    return optima;
  }
  if (name == "F3") {
    for (double b : kFoxholeGrid) {
      for (double a : kFoxholeGrid) {
        optima.points.push_back(refine_2d(
            [&](double x, double y, std::size_t d) {
              return f3_partial(x, y, d, options.foxholes);
            },
            {a, b}, 4.0));
        optima.radii.push_back(1.0);
      }
    }
    return optima;
  }
  if (name == "F4") {
    for (const PeakSpec& p : kIrregularPeaks) {
      optima.points.push_back(refine_2d(f4_partial, {p.a, p.b}, 2.0));
      optima.radii.push_back(1.0);
    }
    return optima;
  }
  throw ConfigError("no reference optima for objective '" + name + "'");
}

// --- ObjectiveRegistry -------------------------------------------------------

ObjectiveRegistry::ObjectiveRegistry() {
  for (const char* name : {"F1", "F2", "F3", "F4"}) {
    Objective objective = make_benchmark(name);
    entries_.emplace(name, Entry{objective.space(), objective.callback()});
  }
}

void ObjectiveRegistry::register_objective(const std::string& name, DesignSpace space,
                                           ObjectiveFn fn) {
  if (name.empty()) throw ConfigError("objective name must not be empty");
  if (!fn) throw ConfigError("objective '" + name + "' has no evaluation callback");
  entries_.insert_or_assign(name, Entry{std::move(space), std::move(fn)});
}

bool ObjectiveRegistry::contains(const std::string& name) const {
  return entries_.count(name) != 0;
}

Objective ObjectiveRegistry::make(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown objective '" + name + "'");
  return Objective(name, it->second.space, it->second.fn);
}

std::vector<std::string> ObjectiveRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, entry] : entries_) out.push_back(name);
  return out;
}

}  // namespace cmn
