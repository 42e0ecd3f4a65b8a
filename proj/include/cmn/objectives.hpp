#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cmn/core.hpp"

namespace cmn {

/// One peak of the irregular two-dimensional test function.
struct PeakSpec {
  double a;  // x coordinate
  double b;  // y coordinate
  double height;
  double width;
};

inline constexpr std::array<PeakSpec, 5> kIrregularPeaks{{
    {-20.0, -20.0, 0.4, 0.02},
    {-5.0, -25.0, 0.2, 0.5},
    {0.0, 30.0, 0.7, 0.01},
    {30.0, 0.0, 1.0, 2.0},
    {30.0, -30.0, 0.05, 0.1},
}};

/// Foxholes denominators: the literal form uses 1 for every hole (near-equal
/// heights); the classic form uses the hole index i = 1..25.
enum class FoxholesForm { kLiteral, kClassic };

double f1(double x);
double f2(double x);
double f3(double x, double y, FoxholesForm form = FoxholesForm::kLiteral);
double f4(double x, double y);

using ObjectiveFn = std::function<double(std::span<const double>)>;

/// A maximization objective with a bounded domain and an evaluation counter.
/// Each Objective value owns its counter; one optimizer run should own one
/// Objective. Not safe for concurrent evaluate() calls.
class Objective {
 public:
  Objective(std::string name, DesignSpace space, ObjectiveFn fn);

  const std::string& name() const { return name_; }
  const DesignSpace& space() const { return space_; }
  std::size_t eval_count() const { return eval_count_; }
  const ObjectiveFn& callback() const { return fn_; }

  /// Evaluates at `x` (which must lie in the space) and counts the call.
  double evaluate(std::span<const double> x);
  double operator()(std::span<const double> x) { return evaluate(x); }

 private:
  friend Objective counting_wrapper(const Objective& objective);

  std::string name_;
  DesignSpace space_;
  ObjectiveFn fn_;
  std::size_t eval_count_ = 0;
};

/// A copy of `objective` with a fresh counter at zero.
Objective counting_wrapper(const Objective& objective);

struct ReferenceOptima {
  std::vector<Genome> points;
  std::vector<double> radii;  // raw units, per point
};

struct ObjectiveOptions {
  FoxholesForm foxholes = FoxholesForm::kLiteral;
};

DesignSpace benchmark_space(const std::string& name);
Objective make_benchmark(const std::string& name, ObjectiveOptions options = {});
/// Local maximizers of F1..F4, refined numerically from analytic seeds.
ReferenceOptima reference_optima(const std::string& name, ObjectiveOptions options = {});

/// Name-addressable objectives. Holds the four benchmarks by default; user
/// objectives register with a name, bounds and callback.
class ObjectiveRegistry {
 public:
  ObjectiveRegistry();

  void register_objective(const std::string& name, DesignSpace space, ObjectiveFn fn);
  bool contains(const std::string& name) const;
  Objective make(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  struct Entry {
    DesignSpace space;
    ObjectiveFn fn;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace cmn
