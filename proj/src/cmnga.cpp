#include "cmn/cmnga.hpp"

#include <algorithm>
#include <cmath>

#include "cmn/operators.hpp"

namespace cmn {

void CmnConfig::validate() const {
  if (n_pop_init < 1 || n_crossover < 1 || n_mutation < 1 || n_min < 1 || n_try < 1) {
    throw ConfigError("CMN GA counts must all be at least 1");
  }
  if (n_crowd < 2) throw ConfigError("CMN GA crowd size must be at least 2");
  if (!(mutation_sigma > 0.0 && mutation_sigma <= 1.0)) {
    throw ConfigError("CMN GA mutation sigma must lie in (0, 1]");
  }
  const ThresholdCoefficients& c = threshold;
  if (!(c.scale > 0.0) || !(c.offset > 1.0) || !(c.decay_weight >= 0.0 && c.decay_weight <= 1.0) ||
      !(c.decay_base >= 0.0 && c.decay_base <= 1.0)) {
    throw ConfigError(
        "threshold coefficients must satisfy scale > 0, offset > 1, "
        "decay weight and base in [0, 1]");
  }
}

double generational_threshold(double f_nearest, std::size_t generation,
                              const ThresholdCoefficients& c) {
  const double decay = std::pow(c.decay_base, static_cast<double>(generation));
  return c.scale * (c.offset - f_nearest * (1.0 - c.decay_weight * decay));
}

double static_threshold(double f_nearest) { return 0.1 * (1.01 - f_nearest); }

double threshold_radius(double f_nearest, std::size_t generation, const CmnConfig& config) {
  if (!(f_nearest >= 0.0 && f_nearest <= 1.0)) {
    throw ContractViolation("threshold_radius: scaled fitness outside [0, 1]");
  }
  return config.threshold_rule == ThresholdRule::kStatic
             ? static_threshold(f_nearest)
             : generational_threshold(f_nearest, generation, config.threshold);
}

const char* to_string(AdmissionPhase phase) {
  switch (phase) {
    case AdmissionPhase::kInitial:
      return "init";
    case AdmissionPhase::kCrossover:
      return "crossover";
    case AdmissionPhase::kMutation:
      return "mutation";
  }
  return "unknown";
}

AdditionDecision addition_filter(const Archive& archive, std::span<const double> candidate,
                                 std::size_t generation, std::span<const double> scaled,
                                 const CmnConfig& config) {
  if (scaled.size() != archive.size()) {
    throw ContractViolation("addition_filter: scaled fitness is not aligned to the archive");
  }
  const Neighbor nearest = archive.nearest(candidate, 1).front();
  AdditionDecision decision;
  decision.nearest_id = nearest.id;
  decision.nearest_distance = nearest.distance;
  decision.nearest_scaled_fitness = scaled[nearest.id];
  decision.threshold = threshold_radius(decision.nearest_scaled_fitness, generation, config);
  decision.accepted = nearest.distance >= decision.threshold;
  return decision;
}

Archive initialize_population(const DesignSpace& space, std::size_t n, Objective& objective,
                              RngStream& rng, std::vector<AdmissionRecord>* log) {
  if (!(space == objective.space())) {
    throw ContractViolation("initialize_population: objective bounds differ from the space");
  }
  Archive archive(space);
  for (std::size_t k = 0; k < n; ++k) {
    Genome genome(space.dim());
    for (std::size_t i = 0; i < space.dim(); ++i) {
      genome[i] = rng.uniform(space.lower(i), space.upper(i));
    }
    const double fitness = objective.evaluate(genome);
    const Individual& added = archive.add(std::move(genome), fitness, 0, 0.0);
    if (log) log->push_back(AdmissionRecord{added.id, 0, AdmissionPhase::kInitial});
  }
  return archive;
}

void refresh_scaling(const Archive& archive, GenerationState& state, const CmnConfig& config) {
  state.optima = detect_local_optima(archive, config.n_min);
  state.scaling_model = FitnessScaling::fit(archive, state.optima);
  state.scaling = state.scaling_model.apply(archive);
}

std::size_t select_parent_fps(std::span<const double> scaled, RngStream& rng) {
  return select_fps(scaled, rng);
}

namespace {

// Bound on the doubles held across all cached weight tables.
constexpr std::size_t kMateCacheLimit = std::size_t{1} << 22;

}  // namespace

const std::vector<double>& MateSampler::table(const Archive& archive, std::size_t p1,
                                              std::size_t population) {
  auto it = tables_.find(p1);
  if (it == tables_.end()) {
    while (stored_ + population > kMateCacheLimit && !tables_.empty()) {
      auto oldest = std::min_element(tables_.begin(), tables_.end(), [](const auto& a, const auto& b) {
        return a.second.last_use < b.second.last_use;
      });
      stored_ -= oldest->second.cumulative.size();
      tables_.erase(oldest);
    }
    it = tables_.emplace(p1, Table{}).first;
  }
  Table& t = it->second;
  t.last_use = ++clock_;
  const auto origin = archive.normalized(p1);
  double total = t.cumulative.empty() ? 0.0 : t.cumulative.back();
  stored_ += population > t.cumulative.size() ? population - t.cumulative.size() : 0;
  for (std::size_t id = t.cumulative.size(); id < population; ++id) {
    if (id != p1) {
      total += proximity_from_distance(std::sqrt(squared_distance(origin, archive.normalized(id))));
    }
    t.cumulative.push_back(total);
  }
  return t.cumulative;
}

// Successive sampling without replacement: each draw is uniform on the
// cumulative-weight line with the intervals of earlier picks cut out.
void MateSampler::sample(const std::vector<double>& cumulative, std::size_t p1,
                         std::size_t population, std::size_t count, RngStream& rng) {
  auto start = [&](std::size_t id) { return id == 0 ? 0.0 : cumulative[id - 1]; };
  auto weight = [&](std::size_t id) { return cumulative[id] - start(id); };
  auto usable = [&](std::size_t id) {
    return id != p1 && weight(id) > 0.0 &&
           !std::binary_search(sorted_.begin(), sorted_.end(), id);
  };
  const double total = cumulative[population - 1];
  double removed = 0.0;
  sorted_.clear();
  while (crowd_.size() < count) {
    double target = rng.uniform() * (total - removed);
    for (std::size_t id : sorted_) {
      if (start(id) <= target) {
        target += weight(id);
      } else {
        break;
      }
    }
    const auto end = cumulative.begin() + static_cast<std::ptrdiff_t>(population);
    auto pick = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), end, target) -
                                         cumulative.begin());
    if (pick >= population) pick = population - 1;
    // Rounding can land on an excluded boundary; take the nearest usable id.
    std::size_t forward = pick;
    while (forward < population && !usable(forward)) ++forward;
    if (forward == population) {
      forward = pick;
      while (!usable(forward)) --forward;
    }
    crowd_.push_back(forward);
    sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), forward), forward);
    removed += weight(forward);
  }
}

std::size_t MateSampler::select(const Archive& archive, std::size_t p1, std::size_t population,
                                std::size_t n_crowd, std::span<const double> ranking,
                                RngStream& rng) {
  if (population < 2 || population > archive.size()) {
    throw ContractViolation("mate selection needs a population of at least 2 archive members");
  }
  if (p1 >= population) throw ContractViolation("mate selection: p1 outside the population");
  if (ranking.size() < population) {
    throw ContractViolation("mate ranking shorter than the population");
  }
  const std::size_t count = std::min(n_crowd, population - 1);
  crowd_.clear();
  if (count == population - 1) {
    for (std::size_t id = 0; id < population; ++id) {
      if (id != p1) crowd_.push_back(id);
    }
  } else {
    sample(table(archive, p1, population), p1, population, count, rng);
  }
  std::size_t best = crowd_.front();
  for (std::size_t id : crowd_) {
    if (ranking[id] > ranking[best] || (ranking[id] == ranking[best] && id < best)) best = id;
  }
  return best;
}

std::size_t select_mate_pps(const Archive& archive, std::size_t p1, std::size_t n_crowd,
                            std::span<const double> ranking, RngStream& rng,
                            std::size_t population) {
  if (archive.size() < 2) throw ContractViolation("mate selection needs at least 2 individuals");
  MateSampler sampler;
  return sampler.select(archive, p1, population == 0 ? archive.size() : population, n_crowd,
                        ranking, rng);
}

std::size_t generation_step(Archive& archive, GenerationState& state, const CmnConfig& config,
                            Objective& objective, RngStream& rng,
                            std::vector<AdmissionRecord>* log) {
  if (archive.empty()) throw ContractViolation("generation_step on an empty archive");
  refresh_scaling(archive, state, config);

  // Parents come from the population as it stood at the start of the
  // generation; admission checks see every member, including newcomers.
  const std::size_t population = archive.size();
  const std::vector<double> selection_fitness = state.scaling.final;
  std::vector<double> mate_ranking;
  if (config.mate_ranking == MateRanking::kRaw) {
    for (const Individual& ind : archive.individuals()) mate_ranking.push_back(ind.raw_fitness);
  } else {
    mate_ranking = selection_fitness;
  }
  const std::size_t generation = state.generation;
  std::size_t added = 0;

  auto try_admit = [&](Genome child, AdmissionPhase phase) {
    const AdditionDecision decision =
        addition_filter(archive, child, generation, state.scaling.final, config);
    if (!decision.accepted) return false;
    const double fitness = objective.evaluate(child);
    const Individual& ind = archive.add(std::move(child), fitness, generation, decision.threshold);
    state.scaling.linear.push_back(state.scaling_model.linear(fitness));
    state.scaling.median_adjusted.push_back(state.scaling_model.median_adjusted(fitness));
    state.scaling.final.push_back(
        state.scaling_model.final_value(archive.normalized(ind.id), fitness));
    if (log) {
      log->push_back(AdmissionRecord{ind.id, generation, phase, decision.nearest_id,
                                     decision.nearest_scaled_fitness, decision.threshold,
                                     decision.nearest_distance});
    }
    ++added;
    return true;
  };

  if (population >= 2) {
    const FpsSampler fps(selection_fitness);
    for (std::size_t slot = 0; slot < config.n_crossover; ++slot) {
      for (std::size_t attempt = 0; attempt < config.n_try; ++attempt) {
        const std::size_t p1 = fps.sample(rng);
        const std::size_t p2 =
            state.mates.select(archive, p1, population, config.n_crowd, mate_ranking, rng);
        if (try_admit(crossover_hypercube(archive[p1].genome, archive[p2].genome, rng),
                      AdmissionPhase::kCrossover)) {
          break;
        }
      }
    }
  }
  for (std::size_t slot = 0; slot < config.n_mutation; ++slot) {
    for (std::size_t attempt = 0; attempt < config.n_try; ++attempt) {
      const std::size_t parent = rng.index(population);
      if (try_admit(mutate_gaussian(archive[parent].genome, config.mutation_sigma,
                                    archive.space(), rng),
                    AdmissionPhase::kMutation)) {
        break;
      }
    }
  }
  ++state.generation;
  return added;
}

CmnResult run_cmn(const CmnConfig& config, Objective& objective, const RunLimits& limits,
                  RngStream& rng, const MetricFn& metric) {
  config.validate();
  if (limits.budget <= config.n_pop_init) {
    throw ConfigError("evaluation budget must exceed the initial population size");
  }
  const std::size_t start_evals = objective.eval_count();
  auto used = [&] { return objective.eval_count() - start_evals; };

  std::vector<AdmissionRecord> log;
  Archive archive =
      initialize_population(objective.space(), config.n_pop_init, objective, rng, &log);
  CmnResult result{std::move(archive), GenerationState{}, ConvergenceTrace{}, std::move(log)};
  result.trace.algorithm = "CMN";
  result.trace.objective = objective.name();
  result.trace.seed = rng.seed();

  auto record = [&] {
    if (!metric) return;
    const MetricSample sample = metric(result.archive.individuals());
    result.trace.record(TracePoint{result.state.generation, used(), sample.raw,
                                   sample.normalized, sample.reported});
  };
  record();

  std::size_t stalled = 0;
  while (true) {
    if (used() >= limits.budget) {
      result.stop_reason = StopReason::kBudget;
      break;
    }
    if (result.state.generation >= limits.max_generations) {
      result.stop_reason = StopReason::kGenerationCap;
      break;
    }
    if (stalled >= limits.stall_generations) {
      result.stop_reason = StopReason::kStall;
      break;
    }
    const std::size_t added =
        generation_step(result.archive, result.state, config, objective, rng, &result.log);
    stalled = added == 0 ? stalled + 1 : 0;
    if (added > 0) record();
  }
  return result;
}

AuditReport audit_admissions(const Archive& archive, std::span<const AdmissionRecord> log,
                             const CmnConfig& config) {
  AuditReport report;
  auto fail = [&](std::size_t id, const std::string& what) {
    ++report.violations;
    if (report.messages.size() < 10) {
      report.messages.push_back("individual " + std::to_string(id) + ": " + what);
    }
  };
  if (log.size() != archive.size()) {
    fail(log.size(), "log has " + std::to_string(log.size()) + " records for an archive of " +
                         std::to_string(archive.size()));
    return report;
  }
  Archive replay(archive.space());
  for (std::size_t k = 0; k < log.size(); ++k) {
    const AdmissionRecord& rec = log[k];
    const Individual& ind = archive[k];
    ++report.checked;
    if (rec.id != k) fail(k, "record out of insertion order");
    if (rec.phase != AdmissionPhase::kInitial) {
      if (replay.empty()) {
        fail(k, "admitted by the filter into an empty archive");
      } else {
        const Neighbor nearest = replay.nearest(ind.genome, 1).front();
        if (nearest.id != rec.nearest_id || nearest.distance != rec.nearest_distance) {
          fail(k, "recorded nearest neighbour does not match the replay");
        }
        const double expected =
            threshold_radius(rec.nearest_scaled_fitness, rec.generation, config);
        if (expected != rec.threshold) fail(k, "threshold differs from the rule");
        if (rec.threshold != archive.insertion_threshold(k)) {
          fail(k, "archive threshold differs from the log");
        }
        if (!(nearest.distance >= rec.threshold)) fail(k, "admitted inside the threshold radius");
      }
    }
    replay.add(ind.genome, ind.raw_fitness, ind.birth_generation, archive.insertion_threshold(k));
  }
  return report;
}

}  // namespace cmn
