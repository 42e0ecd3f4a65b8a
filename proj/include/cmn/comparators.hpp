#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "cmn/core.hpp"
#include "cmn/metrics.hpp"
#include "cmn/objectives.hpp"
#include "cmn/rng.hpp"

namespace cmn {

/// Generational population of constant size.
using FixedPopulation = std::vector<Individual>;

/// Multi-Niche Crowding. Deviations from the original thesis: parent 1 is
/// scanned sequentially through the population, similarity is measured in
/// normalized coordinates, and crossover/mutation are the shared hypercube
/// and Gaussian operators.
struct MncConfig {
  std::size_t n_pop = 50;
  std::size_t n_crossover = 45;
  std::size_t n_mutation = 5;
  std::size_t c_s = 15;  // crowding-selection group size
  std::size_t c_f = 3;   // number of replacement groups
  std::size_t s = 15;    // replacement group size
  double mutation_sigma = 0.40;

  void validate() const;
};

/// Restricted Competition Selection. Choices beyond the published description:
/// parents are chosen by FPS on raw fitness (shifted to be non-negative), and
/// the population slots left after the elites are filled by FPS over the
/// pool's post-competition fitness. r_niche is a raw-unit distance.
struct RcsConfig {
  std::size_t n_pop = 10;
  std::size_t n_elites = 5;
  std::size_t n_crossover = 8;
  std::size_t n_mutation = 2;
  double r_niche = 0.1;
  double mutation_sigma = 0.40;

  void validate() const;
};

/// Collective Animal Behaviour. Implemented from the published rules:
/// the first b individuals keep the memory positions with a uniform jitter of
/// +-v times each dimension's extent; the rest move, with probability h,
/// toward (probability p) or away from their nearest memory element by a
/// random fraction of the gap, and otherwise jump to a random position. The
/// memory keeps the b fittest positions seen, subject to competition: of two
/// positions closer than rho (raw units) only the fitter is kept.
struct CabConfig {
  std::size_t n_pop = 20;
  std::size_t b = 10;
  double h = 0.6;
  double p = 0.8;
  double v = 0.01;
  double rho = 0.1;

  void validate() const;
};

using ComparatorConfig = std::variant<MncConfig, RcsConfig, CabConfig>;

/// Uniformly random population, each member evaluated once. Ids continue
/// from `next_id`, which is advanced.
FixedPopulation initialize_fixed_population(std::size_t n, Objective& objective, RngStream& rng,
                                            std::size_t& next_id);

struct MncState {
  FixedPopulation population;
  std::size_t cursor = 0;  // next sequential parent
  std::size_t next_id = 0;
};

void mnc_step(MncState& state, const MncConfig& config, Objective& objective, RngStream& rng);

struct RcsState {
  FixedPopulation population;
  std::size_t next_id = 0;
};

/// Post-competition fitness of a pool: raw fitness shifted to be
/// non-negative, then zeroed for every member that has a fitter member (ties
/// to the lower index) closer than r_niche.
std::vector<double> restricted_competition(const FixedPopulation& pool, double r_niche);

void rcs_step(RcsState& state, const RcsConfig& config, Objective& objective, RngStream& rng);

struct CabState {
  FixedPopulation population;
  FixedPopulation memory;
  std::size_t next_id = 0;
};

/// The b fittest of `candidates` such that no two kept members are closer
/// than rho. Ties in fitness go to the lower id.
FixedPopulation compete_memory(FixedPopulation candidates, std::size_t b, double rho);

void cab_step(CabState& state, const CabConfig& config, Objective& objective, RngStream& rng);

struct ComparatorResult {
  FixedPopulation population;
  FixedPopulation memory;  // CAB only
  ConvergenceTrace trace;
  std::size_t generations = 0;

  /// Population plus memory: everything the metric sees.
  FixedPopulation survivors() const;
};

std::string algorithm_name(const ComparatorConfig& config);

/// Random initialization followed by steps until the run has spent `budget`
/// evaluations. The metric sees the population (and memory for CAB).
ComparatorResult run_comparator(const ComparatorConfig& config, Objective& objective,
                                std::size_t budget, RngStream& rng, const MetricFn& metric = {});

}  // namespace cmn
