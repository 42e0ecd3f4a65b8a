#include "cmn/comparators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmn/operators.hpp"

namespace cmn {
namespace {

// Squared distance in normalized coordinates, without materializing them.
double unit_squared(std::span<const double> a, std::span<const double> b,
                    const DesignSpace& space) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = (a[i] - b[i]) / space.extent(i);
    sum += diff * diff;
  }
  return sum;
}

// `count` distinct indices from [0, n) excluding `skip` (pass n for none),
// by partial Fisher-Yates. Returns every eligible index if count is larger.
std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t count, std::size_t skip,
                                         RngStream& rng) {
  std::vector<std::size_t> pool;
  pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i != skip) pool.push_back(i);
  }
  const std::size_t take = std::min(count, pool.size());
  for (std::size_t k = 0; k < take; ++k) {
    std::swap(pool[k], pool[k + rng.index(pool.size() - k)]);
  }
  pool.resize(take);
  return pool;
}

Individual evaluate_new(Genome genome, Objective& objective, std::size_t& next_id,
                        std::size_t generation) {
  const double fitness = objective.evaluate(genome);
  return Individual{next_id++, std::move(genome), fitness, generation};
}

std::vector<double> nonnegative_fitness(const FixedPopulation& pop) {
  double lowest = 0.0;
  for (const Individual& ind : pop) lowest = std::min(lowest, ind.raw_fitness);
  std::vector<double> out;
  out.reserve(pop.size());
  for (const Individual& ind : pop) out.push_back(ind.raw_fitness - lowest);
  return out;
}

}  // namespace

void MncConfig::validate() const {
  if (n_pop < 2 || c_s < 1 || c_f < 1 || s < 1) throw ConfigError("MNC sizes must be positive");
  if (c_s > n_pop) throw ConfigError("MNC crowding group size C_S exceeds the population");
  // Replacement groups are drawn independently and may overlap; only each
  // group has to fit in the population.
  if (s > n_pop) throw ConfigError("MNC replacement group size S exceeds the population");
  if (n_crossover + n_mutation < 1) throw ConfigError("MNC must produce offspring");
  if (!(mutation_sigma > 0.0 && mutation_sigma <= 1.0)) {
    throw ConfigError("MNC mutation sigma must lie in (0, 1]");
  }
}

void RcsConfig::validate() const {
  if (n_pop < 1 || n_elites < 1) throw ConfigError("RCS sizes must be positive");
  if (n_elites > n_pop) throw ConfigError("RCS elite count exceeds the population");
  if (n_crossover + n_mutation < 1) throw ConfigError("RCS must produce offspring");
  if (!(r_niche >= 0.0)) throw ConfigError("RCS niche radius must be non-negative");
  if (!(mutation_sigma > 0.0 && mutation_sigma <= 1.0)) {
    throw ConfigError("RCS mutation sigma must lie in (0, 1]");
  }
}

void CabConfig::validate() const {
  if (n_pop < 1 || b < 1) throw ConfigError("CAB sizes must be positive");
  if (b > n_pop) throw ConfigError("CAB memory size B exceeds the population");
  if (!(h >= 0.0 && h <= 1.0) || !(p >= 0.0 && p <= 1.0)) {
    throw ConfigError("CAB probabilities H and P must lie in [0, 1]");
  }
  if (!(v > 0.0) || !(rho > 0.0)) throw ConfigError("CAB v and rho must be positive");
}

FixedPopulation initialize_fixed_population(std::size_t n, Objective& objective, RngStream& rng,
                                            std::size_t& next_id) {
  const DesignSpace& space = objective.space();
  FixedPopulation pop;
  pop.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Genome genome(space.dim());
    for (std::size_t i = 0; i < space.dim(); ++i) {
      genome[i] = rng.uniform(space.lower(i), space.upper(i));
    }
    pop.push_back(evaluate_new(std::move(genome), objective, next_id, 0));
  }
  return pop;
}

// --- MNC -------------------------------------------------------------------

void mnc_step(MncState& state, const MncConfig& config, Objective& objective, RngStream& rng) {
  FixedPopulation& pop = state.population;
  const DesignSpace& space = objective.space();
  const std::size_t n = pop.size();
  if (n < 2) throw ContractViolation("MNC population needs at least 2 members");

  std::vector<Genome> children;
  for (std::size_t c = 0; c < config.n_crossover; ++c) {
    const std::size_t p1 = state.cursor;
    state.cursor = (state.cursor + 1) % n;
    std::size_t mate = n;
    double best = 0.0;
    for (std::size_t id : sample_distinct(n, config.c_s, p1, rng)) {
      const double d = unit_squared(pop[p1].genome, pop[id].genome, space);
      if (mate == n || d < best || (d == best && id < mate)) {
        mate = id;
        best = d;
      }
    }
    children.push_back(crossover_hypercube(pop[p1].genome, pop[mate].genome, rng));
  }
  for (std::size_t m = 0; m < config.n_mutation; ++m) {
    children.push_back(
        mutate_gaussian(pop[rng.index(n)].genome, config.mutation_sigma, space, rng));
  }

  const std::size_t generation = pop.front().birth_generation + 1;
  for (Genome& genome : children) {
    Individual child = evaluate_new(std::move(genome), objective, state.next_id, generation);
    // Worst among most similar.
    std::size_t victim = n;
    for (std::size_t g = 0; g < config.c_f; ++g) {
      std::size_t closest = n;
      double best = 0.0;
      for (std::size_t id : sample_distinct(n, config.s, n, rng)) {
        const double d = unit_squared(child.genome, pop[id].genome, space);
        if (closest == n || d < best || (d == best && id < closest)) {
          closest = id;
          best = d;
        }
      }
      if (victim == n || pop[closest].raw_fitness < pop[victim].raw_fitness ||
          (pop[closest].raw_fitness == pop[victim].raw_fitness && closest < victim)) {
        victim = closest;
      }
    }
    pop[victim] = std::move(child);
  }
}

// --- RCS -------------------------------------------------------------------

std::vector<double> restricted_competition(const FixedPopulation& pool, double r_niche) {
  std::vector<double> working = nonnegative_fitness(pool);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      if (raw_distance(pool[i].genome, pool[j].genome) >= r_niche) continue;
      // j loses ties: it has the higher index.
      if (pool[j].raw_fitness > pool[i].raw_fitness) {
        working[i] = 0.0;
      } else {
        working[j] = 0.0;
      }
    }
  }
  return working;
}

void rcs_step(RcsState& state, const RcsConfig& config, Objective& objective, RngStream& rng) {
  FixedPopulation& pop = state.population;
  const DesignSpace& space = objective.space();
  if (pop.empty()) throw ContractViolation("RCS population is empty");

  const FpsSampler parents(nonnegative_fitness(pop));
  std::vector<Genome> children;
  for (std::size_t c = 0; c < config.n_crossover; ++c) {
    const std::size_t p1 = parents.sample(rng);
    const std::size_t p2 = parents.sample(rng);
    children.push_back(crossover_hypercube(pop[p1].genome, pop[p2].genome, rng));
  }
  for (std::size_t m = 0; m < config.n_mutation; ++m) {
    children.push_back(
        mutate_gaussian(pop[parents.sample(rng)].genome, config.mutation_sigma, space, rng));
  }

  const std::size_t generation = pop.front().birth_generation + 1;
  FixedPopulation pool = pop;
  for (Genome& genome : children) {
    pool.push_back(evaluate_new(std::move(genome), objective, state.next_id, generation));
  }
  const std::vector<double> working = restricted_competition(pool, config.r_niche);

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (working[a] != working[b]) return working[a] > working[b];
    return pool[a].raw_fitness > pool[b].raw_fitness;
  });

  FixedPopulation next;
  next.reserve(config.n_pop);
  const std::size_t elites = std::min(config.n_elites, pool.size());
  for (std::size_t k = 0; k < elites; ++k) next.push_back(pool[order[k]]);
  const FpsSampler fill(working);
  while (next.size() < config.n_pop) next.push_back(pool[fill.sample(rng)]);
  for (Individual& ind : next) ind.birth_generation = generation;
  pop = std::move(next);
}

// --- CAB -------------------------------------------------------------------

FixedPopulation compete_memory(FixedPopulation candidates, std::size_t b, double rho) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Individual& x, const Individual& y) {
                     if (x.raw_fitness != y.raw_fitness) return x.raw_fitness > y.raw_fitness;
                     return x.id < y.id;
                   });
  FixedPopulation kept;
  for (Individual& candidate : candidates) {
    if (kept.size() >= b) break;
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](const Individual& m) {
      return raw_distance(m.genome, candidate.genome) < rho;
    });
    if (!dominated) kept.push_back(std::move(candidate));
  }
  return kept;
}

void cab_step(CabState& state, const CabConfig& config, Objective& objective, RngStream& rng) {
  const DesignSpace& space = objective.space();
  const std::size_t n = config.n_pop;
  if (state.population.size() != n) throw ContractViolation("CAB population has the wrong size");
  if (state.memory.empty() || state.memory.size() > config.b) {
    throw ContractViolation("CAB memory must hold between 1 and B members");
  }

  std::vector<Genome> moved;
  moved.reserve(n);
  const std::size_t kept = std::min(config.b, state.memory.size());
  for (std::size_t l = 0; l < kept; ++l) {
    Genome g = state.memory[l].genome;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += config.v * space.extent(i) * rng.uniform(-1.0, 1.0);
    }
    moved.push_back(space.clamp(std::move(g)));
  }
  for (std::size_t k = kept; k < n; ++k) {
    const Genome& x = state.population[k].genome;
    Genome g(x.size());
    if (rng.bernoulli(config.h)) {
      std::size_t nearest = 0;
      double best = unit_squared(x, state.memory[0].genome, space);
      for (std::size_t m = 1; m < state.memory.size(); ++m) {
        const double d = unit_squared(x, state.memory[m].genome, space);
        if (d < best) {
          best = d;
          nearest = m;
        }
      }
      const Genome& target = state.memory[nearest].genome;
      const double r = rng.uniform();
      const double sign = rng.bernoulli(config.p) ? 1.0 : -1.0;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = x[i] + sign * r * (target[i] - x[i]);
      g = space.clamp(std::move(g));
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = rng.uniform(space.lower(i), space.upper(i));
    }
    moved.push_back(std::move(g));
  }

  const std::size_t generation = state.population.front().birth_generation + 1;
  FixedPopulation next;
  next.reserve(n);
  for (Genome& g : moved) next.push_back(evaluate_new(std::move(g), objective, state.next_id, generation));

  FixedPopulation candidates = state.memory;
  candidates.insert(candidates.end(), next.begin(), next.end());
  state.memory = compete_memory(std::move(candidates), config.b, config.rho);
  state.population = std::move(next);
}

// --- harness ---------------------------------------------------------------

FixedPopulation ComparatorResult::survivors() const {
  FixedPopulation all = population;
  all.insert(all.end(), memory.begin(), memory.end());
  return all;
}

std::string algorithm_name(const ComparatorConfig& config) {
  switch (config.index()) {
    case 0:
      return "MNC";
    case 1:
      return "RCS";
    default:
      return "CAB";
  }
}

ComparatorResult run_comparator(const ComparatorConfig& config, Objective& objective,
                                std::size_t budget, RngStream& rng, const MetricFn& metric) {
  const std::size_t n_pop = std::visit([](const auto& c) { return c.n_pop; }, config);
  std::visit([](const auto& c) { c.validate(); }, config);
  if (budget <= n_pop) throw ConfigError("evaluation budget must exceed the population size");

  const std::size_t start_evals = objective.eval_count();
  auto used = [&] { return objective.eval_count() - start_evals; };

  ComparatorResult result;
  result.trace.algorithm = algorithm_name(config);
  result.trace.objective = objective.name();
  result.trace.seed = rng.seed();

  MncState mnc;
  RcsState rcs;
  CabState cab;
  std::size_t next_id = 0;
  FixedPopulation initial = initialize_fixed_population(n_pop, objective, rng, next_id);
  if (const auto* c = std::get_if<CabConfig>(&config)) {
    cab.memory = compete_memory(initial, c->b, c->rho);
    cab.population = std::move(initial);
    cab.next_id = next_id;
  } else if (std::holds_alternative<MncConfig>(config)) {
    mnc.population = std::move(initial);
    mnc.next_id = next_id;
  } else {
    rcs.population = std::move(initial);
    rcs.next_id = next_id;
  }

  auto sync = [&] {
    if (std::holds_alternative<CabConfig>(config)) {
      result.population = cab.population;
      result.memory = cab.memory;
    } else if (std::holds_alternative<MncConfig>(config)) {
      result.population = mnc.population;
    } else {
      result.population = rcs.population;
    }
  };
  auto record = [&] {
    if (!metric) return;
    sync();
    const FixedPopulation seen = result.survivors();
    const MetricSample sample = metric(seen);
    result.trace.record(
        TracePoint{result.generations, used(), sample.raw, sample.normalized, sample.reported});
  };
  record();

  while (used() < budget) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, MncConfig>) {
            mnc_step(mnc, c, objective, rng);
          } else if constexpr (std::is_same_v<T, RcsConfig>) {
            rcs_step(rcs, c, objective, rng);
          } else {
            cab_step(cab, c, objective, rng);
          }
        },
        config);
    ++result.generations;
    record();
  }
  sync();
  return result;
}

}  // namespace cmn
