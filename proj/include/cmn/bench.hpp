#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cmn/cmnga.hpp"
#include "cmn/comparators.hpp"
#include "cmn/metrics.hpp"
#include "cmn/objectives.hpp"

namespace cmn::bench {

enum class Algorithm { kCmn, kMnc, kRcs, kCab };

/// Accepts cmn/mnc/rcs/cab in any case; throws ConfigError otherwise.
Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algorithm);
/// Accepts F1..F4 (any case) and returns the canonical name.
std::string parse_objective(const std::string& name);

struct CmnSettings {
  CmnConfig config;
  RunLimits limits;
};

using AlgorithmSettings = std::variant<CmnSettings, MncConfig, RcsConfig, CabConfig>;

/// Parameter tables, keyed by objective pair: F1/F2 use the first column,
/// F3/F4 the second.
AlgorithmSettings default_settings(Algorithm algorithm, const std::string& objective);
std::size_t default_budget(const std::string& objective);
std::vector<double> default_thresholds(const std::string& objective);

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses "key=value". Throws ConfigError when there is no '='.
std::pair<std::string, std::string> parse_override(const std::string& text);
/// Reads "key = value" lines; '#' starts a comment.
Overrides parse_config_text(std::istream& in);
Overrides read_config_file(const std::filesystem::path& path);
/// Applies overrides in order. Keys are case-insensitive parameter names
/// (n_pop, n_crossover, c_s, r_niche, rho, ...). Unknown keys or malformed
/// values throw ConfigError.
void apply_overrides(AlgorithmSettings& settings, const Overrides& overrides);
std::vector<std::string> known_keys(Algorithm algorithm);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

inline constexpr const char* kTraceHeader =
    "algorithm,objective,run,seed,generation,evals,metric_raw,metric_normalized";

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace);
/// Inverse of write_trace_csv. Throws std::runtime_error on malformed input.
ConvergenceTrace parse_trace_csv(std::istream& in);

/// Per-admission run log of a CMN run.
void write_run_log(std::ostream& out, const Archive& archive,
                   std::span<const AdmissionRecord> log);
struct ParsedRunLog {
  Archive archive;
  std::vector<AdmissionRecord> log;
};
ParsedRunLog parse_run_log(std::istream& in, const DesignSpace& space);

/// (x, y, raw_fitness) rows; x0..xn-1 headers above two dimensions.
void write_snapshot(std::ostream& out, std::span<const Individual> individuals,
                    std::size_t dim);

struct RunSummary {
  std::string algorithm;
  std::string objective;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::size_t evals = 0;
  std::size_t generations = 0;
  double metric_raw = 0.0;
  double metric_normalized = 0.0;
  std::optional<double> metric_excluding_shallow;  // F4 only
  double metric_reported = 0.0;
  std::vector<std::pair<double, std::optional<std::size_t>>> evals_to_threshold;
  std::size_t peaks_found = 0;
  std::size_t peak_count = 0;
  double wall_seconds = 0.0;
};

struct CellResult {
  ConvergenceTrace trace;
  RunSummary summary;
  FixedPopulation final_individuals;  // archive (CMN) or population + memory
  std::optional<CmnResult> cmn;       // full CMN state, for run logs
};

struct CellSpec {
  Algorithm algorithm = Algorithm::kCmn;
  std::string objective = "F1";
  std::uint64_t seed = 0;
  std::size_t run = 0;
  std::optional<std::size_t> budget;  // default_budget when empty
  Overrides overrides;
  ObjectiveOptions objective_options;
};

/// Index of the shallowest peak of F4, left out of the reported metric for
/// MNC and CAB.
inline constexpr std::size_t kShallowPeakIndex = 4;

CellResult run_cell(const CellSpec& spec);

std::string summary_header();
std::string summary_row(const RunSummary& summary);

struct BenchPlan {
  std::vector<Algorithm> algorithms;
  std::vector<std::string> objectives;
  std::size_t repetitions = 10;
  std::optional<std::size_t> budget;  // per-objective default when empty
  std::uint64_t base_seed = 1;
  std::filesystem::path output;
  std::size_t jobs = 1;
  Overrides overrides;
  ObjectiveOptions objective_options;

  void validate() const;
};

struct BenchReport {
  std::size_t cells = 0;
  std::size_t failures = 0;
  std::vector<std::string> errors;
};

/// Runs every (algorithm, objective, run) cell with seed base_seed + run and
/// writes traces/, plot/, summary.csv and metadata.txt under plan.output.
BenchReport run_bench(const BenchPlan& plan);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string trace_filename(const std::string& algorithm, const std::string& objective,
                           std::size_t run);

}  // namespace cmn::bench
