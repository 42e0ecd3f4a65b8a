#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cmn/cmnga.hpp"
#include "cmn/operators.hpp"

using namespace cmn;

namespace {

DesignSpace unit(std::size_t n) {
  return DesignSpace(std::vector<double>(n, 0.0), std::vector<double>(n, 1.0));
}

bool within_3se(std::size_t hits, std::size_t n, double p) {
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return std::abs(static_cast<double>(hits) / static_cast<double>(n) - p) <= 3.0 * se + 1e-12;
}

// Oracle: inclusion probability of each id in a proximity-proportionate
// crowd of `count` drawn without replacement, by enumerating every ordered
// draw sequence.
void enumerate_inclusion(const std::vector<double>& w, std::size_t count, std::vector<bool>& used,
                         double prob, std::size_t depth, std::vector<double>& inclusion) {
  if (depth == count) return;
  double remaining = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!used[i]) remaining += w[i];
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (used[i] || w[i] == 0.0) continue;
    const double p = prob * w[i] / remaining;
    inclusion[i] += p;
    used[i] = true;
    enumerate_inclusion(w, count, used, p, depth + 1, inclusion);
    used[i] = false;
  }
}

double bumpy(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::cos(9.0 * v) * (1.0 - v * v);
  return s;
}

}  // namespace

TEST_CASE("threshold radius examples") {
  CHECK(static_threshold(1.0) == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(static_threshold(0.0) == doctest::Approx(0.101).epsilon(1e-12));
  CHECK(generational_threshold(1.0, 0) == doctest::Approx(0.04008).epsilon(1e-12));
  CHECK(generational_threshold(1.0, 10000) == doctest::Approx(8e-5).epsilon(1e-9));
  CHECK(generational_threshold(0.0, 7) == doctest::Approx(0.08008).epsilon(1e-12));

  CmnConfig config;
  CHECK(threshold_radius(1.0, 0, config) == generational_threshold(1.0, 0));
  config.threshold_rule = ThresholdRule::kStatic;
  CHECK(threshold_radius(0.0, 50, config) == static_threshold(0.0));
  CHECK_THROWS_AS(threshold_radius(1.5, 0, config), ContractViolation);
  CHECK_THROWS_AS(threshold_radius(-0.1, 0, config), ContractViolation);
}

TEST_CASE("threshold radius is monotone on a parameter grid") {
  for (int gi = 1; gi <= 100; ++gi) {
    for (int fi = 0; fi < 100; ++fi) {
      const double f = fi / 99.0;
      const auto g = static_cast<std::size_t>(gi);
      CHECK(generational_threshold(f, g) > 0.0);
      if (fi > 0) CHECK(generational_threshold(f, g) < generational_threshold((fi - 1) / 99.0, g));
      if (fi > 0 && gi > 1) CHECK(generational_threshold(f, g) < generational_threshold(f, g - 1));
    }
  }
}

TEST_CASE("addition filter examples") {
  Archive archive(unit(1));
  archive.add({0.5}, 1.0, 0);
  archive.add({0.9}, 0.0, 0);
  const std::vector<double> scaled{1.0, 0.0};
  CmnConfig config;

  auto coincident = addition_filter(archive, std::vector<double>{0.5}, 3, scaled, config);
  CHECK_FALSE(coincident.accepted);
  CHECK(coincident.nearest_id == 0);
  CHECK(coincident.nearest_distance == 0.0);

  for (double f : {0.0, 0.3, 1.0}) {
    const std::vector<double> s{f, f};
    CHECK(addition_filter(archive, std::vector<double>{0.3}, 0, s, config).accepted);
  }

  auto tight = addition_filter(archive, std::vector<double>{0.5001}, 500, scaled, config);
  CHECK(tight.accepted);
  CHECK(tight.threshold == doctest::Approx(8e-5).epsilon(1e-9));

  auto loose = addition_filter(archive, std::vector<double>{0.85}, 0, scaled, config);
  CHECK(loose.nearest_id == 1);
  CHECK(loose.threshold == doctest::Approx(0.08008));
  CHECK_FALSE(loose.accepted);

  CHECK_THROWS_AS(addition_filter(archive, std::vector<double>{0.3}, 0, std::vector<double>{1.0},
                                  config),
                  ContractViolation);
}

TEST_CASE("fitness-proportionate selection frequencies") {
  RngStream rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(select_parent_fps(std::vector<double>{1, 0, 0}, rng) == 0);

  const int n = 10000;
  std::size_t first = 0;
  for (int i = 0; i < n; ++i) first += select_parent_fps(std::vector<double>{1, 1}, rng) == 0;
  CHECK(std::abs(first / double(n) - 0.5) <= 0.02);

  first = 0;
  const FpsSampler sampler(std::vector<double>{3, 1});
  for (int i = 0; i < n; ++i) first += sampler.sample(rng) == 0;
  CHECK(within_3se(first, n, 0.75));

  std::size_t zeros = 0;
  for (int i = 0; i < n; ++i) zeros += select_fps(std::vector<double>{0, 0, 0, 0}, rng) == 0;
  CHECK(within_3se(zeros, n, 0.25));
}

TEST_CASE("mate selection examples") {
  Archive two(unit(1));
  two.add({0.2}, 0.0, 0);
  two.add({0.7}, 0.0, 0);
  RngStream rng(5);
  CHECK(select_mate_pps(two, 0, 10, std::vector<double>{0.0, 0.0}, rng) == 1);

  Archive one(unit(1));
  one.add({0.2}, 0.0, 0);
  CHECK_THROWS_AS(select_mate_pps(one, 0, 10, std::vector<double>{0.0}, rng), ContractViolation);

  Archive many(unit(1));
  const std::vector<double> fitness{0.1, 0.9, 0.3, 0.9, 0.5};
  for (std::size_t i = 0; i < fitness.size(); ++i) many.add({0.1 + 0.2 * i}, fitness[i], 0);
  CHECK(select_mate_pps(many, 0, 4, fitness, rng) == 1);
  CHECK(select_mate_pps(many, 1, 10, fitness, rng) == 3);

  Archive three(unit(1));
  three.add({0.1}, 0.0, 0);
  three.add({0.11}, 0.0, 0);
  three.add({0.9}, 0.0, 0);
  const std::vector<double> flat{0.0, 0.0, 0.0};
  const int n = 10000;
  std::size_t near = 0;
  MateSampler sampler;
  for (int i = 0; i < n; ++i) near += sampler.select(three, 0, 3, 1, flat, rng) == 1;
  const double p = (1 / 0.01) / (1 / 0.01 + 1 / 0.8);
  CHECK(p == doctest::Approx(0.988).epsilon(1e-3));
  CHECK(within_3se(near, n, p));
}

TEST_CASE("proximity-proportionate crowds match an enumeration oracle") {
  RngStream setup(12);
  Archive archive(DesignSpace({0.0, -5.0}, {2.0, 5.0}));
  for (int i = 0; i < 8; ++i) {
    archive.add({setup.uniform(0.0, 2.0), setup.uniform(-5.0, 5.0)}, 0.0, 0);
  }
  const std::size_t p1 = 2;
  std::vector<double> w(archive.size(), 0.0);
  for (std::size_t i = 0; i < archive.size(); ++i) {
    if (i != p1) w[i] = proximity(archive[p1].genome, archive[i].genome, archive.space());
  }
  const std::vector<double> ranking(archive.size(), 0.0);

  for (std::size_t count : {1u, 3u}) {
    CAPTURE(count);
    std::vector<double> inclusion(w.size(), 0.0);
    std::vector<bool> used(w.size(), false);
    enumerate_inclusion(w, count, used, 1.0, 0, inclusion);
    CHECK(std::accumulate(inclusion.begin(), inclusion.end(), 0.0) == doctest::Approx(count));

    std::vector<std::size_t> hits(w.size(), 0);
    RngStream rng(99 + count);
    MateSampler sampler;
    const std::size_t n = 10000;
    for (std::size_t t = 0; t < n; ++t) {
      sampler.select(archive, p1, archive.size(), count, ranking, rng);
      const auto crowd = sampler.last_crowd();
      CHECK(crowd.size() == count);
      std::vector<std::size_t> sorted(crowd.begin(), crowd.end());
      std::sort(sorted.begin(), sorted.end());
      CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
      for (std::size_t id : crowd) ++hits[id];
    }
    CHECK(hits[p1] == 0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i == p1) continue;
      CAPTURE(i);
      CHECK(within_3se(hits[i], n, inclusion[i]));
    }
  }
}

TEST_CASE("mate selection honours the population bound and sampler reuse") {
  Archive archive(unit(2));
  RngStream setup(3);
  for (int i = 0; i < 40; ++i) archive.add({setup.uniform(), setup.uniform()}, setup.uniform(), 0);
  std::vector<double> ranking(archive.size());
  for (std::size_t i = 0; i < archive.size(); ++i) ranking[i] = archive[i].raw_fitness;

  // A persistent sampler and a fresh one consume the RNG identically.
  MateSampler persistent;
  RngStream a(8), b(8);
  for (int t = 0; t < 300; ++t) {
    const std::size_t population = 10 + static_cast<std::size_t>(t) / 10;
    const std::size_t p1 = a.index(population);
    CHECK(p1 == b.index(population));
    const std::size_t mate = persistent.select(archive, p1, population, 5, ranking, a);
    CHECK(mate == select_mate_pps(archive, p1, 5, ranking, b, population));
    CHECK(mate < population);
    CHECK(mate != p1);
  }
}

TEST_CASE("hypercube crossover") {
  RngStream rng(4);
  const std::vector<double> same{0.3, 0.7};
  CHECK(crossover_hypercube(same, same, rng) == Genome(same));

  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto child = crossover_hypercube(std::vector<double>{0, 0}, std::vector<double>{1, 1}, rng);
    sum += child[0];
  }
  CHECK(std::abs(sum / n - 0.5) <= 0.01);

  for (int i = 0; i < n; ++i) {
    const Genome p{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Genome q{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Genome c = crossover_hypercube(p, q, rng);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(c[k] >= std::min(p[k], q[k]));
      CHECK(c[k] <= std::max(p[k], q[k]));
    }
  }
}

TEST_CASE("gaussian mutation") {
  RngStream rng(6);
  const DesignSpace space({-10.0, 0.0}, {10.0, 4.0});
  const std::vector<double> centre{0.0, 2.0};
  for (double sigma : {0.01, 0.05}) {
    const int n = 100000;
    double s0 = 0.0, s1 = 0.0;
    for (int i = 0; i < n; ++i) {
      const Genome m = mutate_gaussian(centre, sigma, space, rng);
      s0 += m[0] * m[0];
      s1 += (m[1] - 2.0) * (m[1] - 2.0);
    }
    CHECK(std::sqrt(s0 / n) == doctest::Approx(sigma * 20.0).epsilon(0.02));
    CHECK(std::sqrt(s1 / n) == doctest::Approx(sigma * 4.0).epsilon(0.02));
  }
  for (int i = 0; i < 10000; ++i) {
    CHECK(space.contains(mutate_gaussian(std::vector<double>{9.5, 0.1}, 0.4, space, rng)));
  }
  const Genome still = mutate_gaussian(centre, 1e-300, space, rng);
  CHECK(std::abs(still[0] - centre[0]) < 1e-250);
  CHECK(still[1] == centre[1]);
}

TEST_CASE("configuration validation") {
  CmnConfig config;
  CHECK_NOTHROW(config.validate());
  config.n_crowd = 1;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.mutation_sigma = 0.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.n_try = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);

  Objective objective = make_benchmark("F1");
  RngStream rng(1);
  CHECK_THROWS_AS(run_cmn(CmnConfig{}, objective, RunLimits{10}, rng), ConfigError);
}

TEST_CASE("initialization") {
  Objective objective = make_benchmark("F1");
  RngStream rng(10);
  Archive archive = initialize_population(objective.space(), 10, objective, rng);
  CHECK(archive.size() == 10);
  CHECK(objective.eval_count() == 10);
  Objective again = make_benchmark("F1");
  RngStream rng2(10);
  Archive replay = initialize_population(again.space(), 10, again, rng2);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(objective.space().contains(archive[i].genome));
    CHECK(archive[i].genome == replay[i].genome);
    CHECK(archive.insertion_threshold(i) == 0.0);
  }
}

TEST_CASE("generation steps keep evaluation parity") {
  Objective objective = make_benchmark("F1");
  RngStream rng(21);
  CmnConfig config;
  Archive archive = initialize_population(objective.space(), config.n_pop_init, objective, rng);
  GenerationState state;
  for (int g = 0; g < 60; ++g) {
    const std::size_t before = archive.size();
    const std::size_t added = generation_step(archive, state, config, objective, rng);
    CHECK(added <= config.n_crossover + config.n_mutation);
    CHECK(archive.size() == before + added);
    CHECK(objective.eval_count() == archive.size());
    CHECK(state.generation == static_cast<std::size_t>(g + 1));
    for (std::size_t id : state.optima) CHECK(std::abs(state.scaling.final[id] - 1.0) <= 1e-9);
    for (double f : state.scaling.final) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
}

TEST_CASE("runs are deterministic and respect the budget") {
  const DesignSpace space(std::vector<double>(4, -1.0), std::vector<double>(4, 1.0));
  CmnConfig config;
  RunLimits limits;
  limits.budget = 500;

  Objective first("bumpy", space, bumpy);
  RngStream rng1(8);
  const CmnResult a = run_cmn(config, first, limits, rng1);
  Objective second("bumpy", space, bumpy);
  RngStream rng2(8);
  const CmnResult b = run_cmn(config, second, limits, rng2);

  CHECK(a.stop_reason == StopReason::kBudget);
  CHECK(first.eval_count() >= 500);
  CHECK(first.eval_count() <= 500 + config.n_crossover + config.n_mutation - 1);
  CHECK(first.eval_count() == a.archive.size());
  REQUIRE(a.archive.size() == b.archive.size());
  for (std::size_t i = 0; i < a.archive.size(); ++i) {
    CHECK(a.archive[i].genome == b.archive[i].genome);
    CHECK(a.archive[i].raw_fitness == b.archive[i].raw_fitness);
  }

  Objective capped("bumpy", space, bumpy);
  RngStream rng3(8);
  limits.max_generations = 5;
  const CmnResult c = run_cmn(config, capped, limits, rng3);
  CHECK(c.stop_reason == StopReason::kGenerationCap);
  CHECK(c.state.generation == 5);
}

TEST_CASE("F1 runs stall once the admission radius saturates the line") {
  Objective objective = make_benchmark("F1");
  RngStream rng(3);
  const CmnResult result = run_cmn(CmnConfig{}, objective, RunLimits{}, rng);
  CHECK(objective.eval_count() == result.archive.size());
  CHECK(objective.eval_count() <= 2000);
  if (result.stop_reason == StopReason::kStall) {
    // No candidate can pass: every point of [0, 1] is within reach of a member.
    CHECK(result.archive.size() < 2000);
  }
}

TEST_CASE("admission audit") {
  Objective objective = make_benchmark("F2");
  RngStream rng(17);
  RunLimits limits;
  limits.budget = 300;
  CmnResult result = run_cmn(CmnConfig{}, objective, limits, rng);
  const AuditReport report = audit_admissions(result.archive, result.log, CmnConfig{});
  CHECK(report.ok());
  CHECK(report.checked == result.archive.size());

  REQUIRE(result.log.size() > 12);
  auto tampered = result.log;
  tampered[12].threshold *= 2.0;
  CHECK_FALSE(audit_admissions(result.archive, tampered, CmnConfig{}).ok());
  tampered = result.log;
  tampered[11].nearest_id = (tampered[11].nearest_id + 1) % 11;
  CHECK_FALSE(audit_admissions(result.archive, tampered, CmnConfig{}).ok());
  tampered = result.log;
  tampered.pop_back();
  CHECK_FALSE(audit_admissions(result.archive, tampered, CmnConfig{}).ok());
}

TEST_CASE("raw mate ranking") {
  Objective objective = make_benchmark("F2");
  RngStream rng(17);
  CmnConfig config;
  config.mate_ranking = MateRanking::kRaw;
  RunLimits limits;
  limits.budget = 200;
  const CmnResult result = run_cmn(config, objective, limits, rng);
  CHECK(objective.eval_count() == result.archive.size());
  CHECK(audit_admissions(result.archive, result.log, config).ok());
}
