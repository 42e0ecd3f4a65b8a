#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <span>
#include <unordered_map>
#include <vector>

#include "cmn/core.hpp"
#include "cmn/metrics.hpp"
#include "cmn/objectives.hpp"
#include "cmn/rng.hpp"
#include "cmn/scaling.hpp"

namespace cmn {

/// Coefficients of the generation-dependent admission radius
///   R = scale * (offset - f * (1 - decay_weight * decay_base^G)).
struct ThresholdCoefficients {
  double scale = 0.08;
  double offset = 1.001;
  double decay_weight = 0.5;
  double decay_base = 0.9;
};

enum class ThresholdRule {
  kGenerational,  // tightens with generation number (default)
  kStatic,        // 0.1 * (1.01 - f), independent of generation
};

/// Which fitness picks the winner of a PPS crowd.
enum class MateRanking { kScaled, kRaw };

struct CmnConfig {
  std::size_t n_pop_init = 10;
  std::size_t n_crossover = 3;
  std::size_t n_mutation = 2;
  std::size_t n_min = 3;
  std::size_t n_crowd = 10;
  std::size_t n_try = 100;
  double mutation_sigma = 0.40;  // fraction of each dimension's extent
  ThresholdCoefficients threshold;
  ThresholdRule threshold_rule = ThresholdRule::kGenerational;
  MateRanking mate_ranking = MateRanking::kScaled;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

double generational_threshold(double f_nearest, std::size_t generation,
                              const ThresholdCoefficients& coefficients = {});
double static_threshold(double f_nearest);
/// Admission radius (normalized units) around an individual with scaled
/// fitness f_nearest in [0, 1].
double threshold_radius(double f_nearest, std::size_t generation, const CmnConfig& config);

enum class AdmissionPhase { kInitial, kCrossover, kMutation };

const char* to_string(AdmissionPhase phase);

/// One appended individual, with the quantities that justified admitting it.
struct AdmissionRecord {
  std::size_t id = 0;
  std::size_t generation = 0;
  AdmissionPhase phase = AdmissionPhase::kInitial;
  std::size_t nearest_id = 0;
  double nearest_scaled_fitness = 0.0;
  double threshold = 0.0;
  double nearest_distance = 0.0;
};

struct AdditionDecision {
  bool accepted = false;
  std::size_t nearest_id = 0;
  double nearest_distance = 0.0;
  double nearest_scaled_fitness = 0.0;
  double threshold = 0.0;
};

/// Admission test for a candidate genome, run before it is evaluated.
/// `scaled` holds the current final scaled fitness of every archive member.
AdditionDecision addition_filter(const Archive& archive, std::span<const double> candidate,
                                 std::size_t generation, std::span<const double> scaled,
                                 const CmnConfig& config);

/// Proximity-proportionate mate selection. Keeps one cumulative weight table
/// per first parent; tables persist across generations and are extended as
/// the (append-only) archive grows, so a sampler must only ever be used with
/// one archive.
class MateSampler {
 public:
  /// Samples a crowd of min(n_crowd, population - 1) distinct candidates from
  /// ids [0, population) other than p1, each draw proportional to proximity
  /// to p1 among those not yet drawn, and returns the member with the highest
  /// `ranking` (ties to the lower id).
  std::size_t select(const Archive& archive, std::size_t p1, std::size_t population,
                     std::size_t n_crowd, std::span<const double> ranking, RngStream& rng);

  /// Ids of the most recent crowd, in draw order.
  std::span<const std::size_t> last_crowd() const { return crowd_; }

 private:
  struct Table {
    std::vector<double> cumulative;
    std::uint64_t last_use = 0;
  };

  const std::vector<double>& table(const Archive& archive, std::size_t p1,
                                   std::size_t population);
  void sample(const std::vector<double>& cumulative, std::size_t p1, std::size_t population,
              std::size_t count, RngStream& rng);

  std::unordered_map<std::size_t, Table> tables_;
  std::size_t stored_ = 0;
  std::uint64_t clock_ = 0;
  std::vector<std::size_t> crowd_;
  std::vector<std::size_t> sorted_;
};

struct GenerationState {
  std::size_t generation = 0;
  MateSampler mates;
  FitnessScaling scaling_model;
  ScaledFitnessView scaling;  // aligned to archive ids
  std::vector<std::size_t> optima;
};

/// n individuals drawn uniformly over `space`, each evaluated once.
Archive initialize_population(const DesignSpace& space, std::size_t n, Objective& objective,
                              RngStream& rng, std::vector<AdmissionRecord>* log = nullptr);

/// Recomputes the local optima and all scaled fitness values.
void refresh_scaling(const Archive& archive, GenerationState& state, const CmnConfig& config);

std::size_t select_parent_fps(std::span<const double> scaled, RngStream& rng);

/// Samples a crowd of up to n_crowd distinct mates for p1 with probability
/// proportional to proximity, then returns the crowd member with the highest
/// `ranking` (ties to the lower id). Only ids below `population` take part;
/// zero means the whole archive.
std::size_t select_mate_pps(const Archive& archive, std::size_t p1, std::size_t n_crowd,
                            std::span<const double> ranking, RngStream& rng,
                            std::size_t population = 0);

/// Runs one generation and returns the number of individuals appended.
std::size_t generation_step(Archive& archive, GenerationState& state, const CmnConfig& config,
                            Objective& objective, RngStream& rng,
                            std::vector<AdmissionRecord>* log = nullptr);

struct RunLimits {
  std::size_t budget = 2000;  // objective evaluations
  std::size_t max_generations = 1'000'000;
  std::size_t stall_generations = 50;  // consecutive generations with no additions
};

enum class StopReason { kBudget, kGenerationCap, kStall };

struct CmnResult {
  Archive archive;
  GenerationState state;
  ConvergenceTrace trace;
  std::vector<AdmissionRecord> log;
  StopReason stop_reason = StopReason::kBudget;
};

CmnResult run_cmn(const CmnConfig& config, Objective& objective, const RunLimits& limits,
                  RngStream& rng, const MetricFn& metric = {});


struct AuditReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::vector<std::string> messages;  // first few violations, for diagnostics

  bool ok() const { return violations == 0; }
};

/// Replays the admissions of a finished run in insertion order against a fresh
/// archive and checks that each recorded nearest neighbour, distance and
/// threshold is what the rules give, and that the distance met the threshold.
AuditReport audit_admissions(const Archive& archive, std::span<const AdmissionRecord> log,
                             const CmnConfig& config);

}  // namespace cmn
