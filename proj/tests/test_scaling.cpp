#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cmn/objectives.hpp"
#include "cmn/rng.hpp"
#include "cmn/scaling.hpp"

using namespace cmn;

namespace {

DesignSpace unit(std::size_t n) {
  return DesignSpace(std::vector<double>(n, 0.0), std::vector<double>(n, 1.0));
}

double plain_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

double oracle_exponent(double median) {
  if (median <= 0.0) return 0.1;
  if (median >= 1.0) return 10.0;
  return std::log(0.5) / std::log(median);
}

// Oracle for the full final scaling, written from the formulas directly.
std::vector<double> oracle_final(const Archive& archive, const std::vector<std::size_t>& optima) {
  const std::size_t n = archive.size();
  double lo = archive[0].raw_fitness;
  for (std::size_t i = 0; i < n; ++i) lo = std::min(lo, archive[i].raw_fitness);
  std::vector<std::vector<double>> columns;
  for (std::size_t j : optima) {
    const double hi = archive[j].raw_fitness;
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = hi > lo ? std::clamp((archive[i].raw_fitness - lo) / (hi - lo), 0.0, 1.0) : 0.5;
    }
    const double e = oracle_exponent(plain_median(col));
    for (double& v : col) v = std::pow(v, e);
    columns.push_back(col);
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    bool coincident = false;
    for (std::size_t k = 0; k < optima.size(); ++k) {
      const double d = distance(archive[i].genome, archive[optima[k]].genome, archive.space());
      if (d < 1e-12) {
        out[i] = columns[k][i];
        coincident = true;
        break;
      }
      num += columns[k][i] / d;
      den += 1.0 / d;
    }
    if (!coincident) out[i] = optima.size() == 1 ? columns[0][i] : num / den;
  }
  return out;
}

// Oracle: i is an optimum iff it beats its n_min nearest by (distance, id).
std::vector<std::size_t> oracle_optima(const Archive& archive, std::size_t n_min) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < archive.size(); ++i) {
    std::vector<std::pair<double, std::size_t>> others;
    for (std::size_t j = 0; j < archive.size(); ++j) {
      if (j == i) continue;
      others.emplace_back(squared_distance(archive.normalized(i), archive.normalized(j)), j);
    }
    std::sort(others.begin(), others.end());
    bool best = true;
    for (std::size_t k = 0; k < std::min(n_min, others.size()); ++k) {
      const std::size_t j = others[k].second;
      const double fi = archive[i].raw_fitness, fj = archive[j].raw_fitness;
      if (fj > fi || (fj == fi && j < i)) best = false;
    }
    if (best) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("linear scaling examples") {
  CHECK(scale_linear(std::vector<double>{2, 4, 6}) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(scale_linear(std::vector<double>{7, 7, 7}) == std::vector<double>{0.5, 0.5, 0.5});
  CHECK(scale_linear(std::vector<double>{0, 1}) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("median exponent examples") {
  const auto same = scale_median_exponent(std::vector<double>{0.0, 0.5, 1.0});
  CHECK(same[1] == doctest::Approx(0.5).epsilon(1e-15));
  const auto root = scale_median_exponent(std::vector<double>{0.0, 0.25, 1.0});
  CHECK(root[0] == 0.0);
  CHECK(root[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(root[2] == 1.0);
  CHECK(median_exponent(0.0) == 0.1);
  CHECK(median_exponent(1.0) == 10.0);
  CHECK(median_exponent(0.25) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("lower median") {
  CHECK(lower_median(std::vector<double>{3.0}) == 3.0);
  CHECK(lower_median(std::vector<double>{4.0, 1.0}) == 1.0);
  CHECK(lower_median(std::vector<double>{5.0, 1.0, 3.0, 2.0}) == 2.0);
  CHECK_THROWS_AS(lower_median(std::vector<double>{}), ContractViolation);

  RngStream rng(19);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(1 + rng.index(40));
    for (double& x : v) x = rng.uniform();
    const double m = lower_median(v);
    const auto below = std::count_if(v.begin(), v.end(), [m](double x) { return x < m; });
    const auto at_or_below = std::count_if(v.begin(), v.end(), [m](double x) { return x <= m; });
    CHECK(static_cast<std::size_t>(below) <= (v.size() - 1) / 2);
    CHECK(static_cast<std::size_t>(at_or_below) >= (v.size() + 1) / 2);

    const auto linear = scale_linear(v);
    const auto adjusted = scale_median_exponent(linear);
    if (v.size() >= 3) {
      CHECK(*std::min_element(linear.begin(), linear.end()) == 0.0);
      CHECK(*std::max_element(linear.begin(), linear.end()) == 1.0);
      CHECK(std::abs(lower_median(adjusted) - 0.5) <= 1e-9);
    }
  }
}

TEST_CASE("local optima on a dense F1 grid") {
  Archive archive(unit(1));
  for (int i = 0; i < 1000; ++i) {
    const double x = i / 999.0;
    archive.add({x}, f1(x), 0);
  }
  const auto optima = detect_local_optima(archive, 3);
  CHECK(optima == oracle_optima(archive, 3));
  // f1 is still rising at x = 1 (the next crest lies outside the domain), so
  // the last grid point is a boundary optimum on top of the five crests.
  REQUIRE(optima.size() == 6);
  CHECK(optima.back() == 999);
  for (int k = 0; k < 5; ++k) {
    const double peak = (std::numbers::pi / 2 + k * std::numbers::pi - 0.5) / (5.1 * std::numbers::pi);
    CHECK(std::abs(archive[optima[k]].genome[0] - peak) <= 0.002);
  }
}

TEST_CASE("local optima tie and degenerate cases") {
  Archive single(unit(1));
  single.add({0.3}, -4.0, 0);
  CHECK(detect_local_optima(single, 3) == std::vector<std::size_t>{0});

  Archive pair(unit(1));
  pair.add({0.4}, 1.0, 0);
  pair.add({0.5}, 1.0, 0);
  CHECK(detect_local_optima(pair, 3) == std::vector<std::size_t>{0});

  Archive reversed(unit(1));
  reversed.add({0.5}, 2.0, 0);
  reversed.add({0.4}, 2.0, 0);
  reversed.add({0.1}, 0.0, 0);
  CHECK(detect_local_optima(reversed, 1) == std::vector<std::size_t>{0});
}

TEST_CASE("local optima agree with brute force on random archives") {
  RngStream rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t dim = 1 + rng.index(2);
    Archive archive(unit(dim));
    const std::size_t n = 2 + rng.index(150);
    for (std::size_t i = 0; i < n; ++i) {
      Genome g(dim);
      for (double& v : g) v = rng.uniform();
      // Few distinct fitness levels so ties occur.
      archive.add(g, static_cast<double>(rng.index(6)), 0);
    }
    const std::size_t n_min = 1 + rng.index(6);
    CHECK(detect_local_optima(archive, n_min) == oracle_optima(archive, n_min));
  }
}

TEST_CASE("final scaling matches the formula oracle") {
  RngStream rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const DesignSpace space({-2.0, 10.0}, {2.0, 30.0});
    Archive archive(space);
    const std::size_t n = 5 + rng.index(200);
    for (std::size_t i = 0; i < n; ++i) {
      const Genome g{rng.uniform(-2.0, 2.0), rng.uniform(10.0, 30.0)};
      archive.add(g, std::sin(3.0 * g[0]) * std::cos(0.4 * g[1]) + 0.1 * g[0], 0);
    }
    const auto optima = detect_local_optima(archive, 1 + rng.index(5));
    const auto got = scale_proximity_weighted(archive, optima);
    const auto want = oracle_final(archive, optima);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
      CHECK(got[i] >= 0.0);
      CHECK(got[i] <= 1.0);
    }
    for (std::size_t id : optima) CHECK(std::abs(got[id] - 1.0) <= 1e-9);
  }
}

TEST_CASE("final scaling special cases") {
  Archive archive(unit(1));
  const double xs[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  const double fs[] = {1.0, 3.0, 2.0, 5.0, 0.0};
  for (int i = 0; i < 5; ++i) archive.add({xs[i]}, fs[i], 0);

  SUBCASE("no optima falls back to the median-adjusted values") {
    const auto model = FitnessScaling::fit(archive, {});
    const auto view = model.apply(archive);
    CHECK(view.final == view.median_adjusted);
    CHECK(view.median_adjusted == scale_median_exponent(scale_linear(std::vector<double>(fs, fs + 5))));
  }
  SUBCASE("one optimum collapses to its anchored scaling") {
    const std::vector<std::size_t> one{3};
    const auto final_values = scale_proximity_weighted(archive, one);
    const auto linear = scale_linear(std::vector<double>(fs, fs + 5));
    CHECK(final_values == scale_median_exponent(linear));
  }
  SUBCASE("an equidistant point takes the mean of the two anchored values") {
    const std::vector<std::size_t> two{1, 3};
    const auto model = FitnessScaling::fit(archive, two);
    // Anchors at 0.3 (fitness 3) and 0.7 (fitness 5): the lower median of each
    // column is the value of fitness 2.
    const double e1 = std::log(0.5) / std::log(2.0 / 3.0);
    const double e2 = std::log(0.5) / std::log(2.0 / 5.0);
    const double raw = 1.5;
    const double a = std::pow(1.5 / 3.0, e1), b = std::pow(1.5 / 5.0, e2);
    CHECK(model.final_value(std::vector<double>{0.5}, raw) == doctest::Approx((a + b) / 2).epsilon(1e-14));
    CHECK(model.final_value(std::vector<double>{0.3}, 4.0) == 1.0);
    CHECK(model.optimum_count() == 2);
  }
}
