#include "cmn/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <thread>

namespace cmn::bench {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid integer for '" + key + "': '" + text + "'");
  }
  return value;
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    return parse_double(text);
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': '" + text + "'");
  }
}

bool is_paired_with_f3(const std::string& objective) {
  return objective == "F3" || objective == "F4";
}

[[noreturn]] void unknown_key(const std::string& algorithm, const std::string& key) {
  throw ConfigError("unknown " + algorithm + " parameter '" + key + "'");
}

void apply_cmn(CmnSettings& s, const std::string& key, const std::string& value) {
  CmnConfig& c = s.config;
  if (key == "n_pop" || key == "n_pop_init") c.n_pop_init = parse_count(key, value);
  else if (key == "n_crossover") c.n_crossover = parse_count(key, value);
  else if (key == "n_mutation") c.n_mutation = parse_count(key, value);
  else if (key == "n_min") c.n_min = parse_count(key, value);
  else if (key == "n_crowd") c.n_crowd = parse_count(key, value);
  else if (key == "n_try") c.n_try = parse_count(key, value);
  else if (key == "mutation_sigma") c.mutation_sigma = parse_real(key, value);
  else if (key == "threshold_scale") c.threshold.scale = parse_real(key, value);
  else if (key == "threshold_offset") c.threshold.offset = parse_real(key, value);
  else if (key == "threshold_decay_weight") c.threshold.decay_weight = parse_real(key, value);
  else if (key == "threshold_decay_base") c.threshold.decay_base = parse_real(key, value);
  else if (key == "threshold_rule") {
    const std::string v = lower(value);
    if (v == "generational") c.threshold_rule = ThresholdRule::kGenerational;
    else if (v == "static") c.threshold_rule = ThresholdRule::kStatic;
    else throw ConfigError("threshold_rule must be 'generational' or 'static'");
  } else if (key == "mate_ranking") {
    const std::string v = lower(value);
    if (v == "scaled") c.mate_ranking = MateRanking::kScaled;
    else if (v == "raw") c.mate_ranking = MateRanking::kRaw;
    else throw ConfigError("mate_ranking must be 'scaled' or 'raw'");
  } else if (key == "max_generations") s.limits.max_generations = parse_count(key, value);
  else if (key == "stall_generations") s.limits.stall_generations = parse_count(key, value);
  else unknown_key("CMN", key);
}

void apply_mnc(MncConfig& c, const std::string& key, const std::string& value) {
  if (key == "n_pop") c.n_pop = parse_count(key, value);
  else if (key == "n_crossover") c.n_crossover = parse_count(key, value);
  else if (key == "n_mutation") c.n_mutation = parse_count(key, value);
  else if (key == "c_s") c.c_s = parse_count(key, value);
  else if (key == "c_f") c.c_f = parse_count(key, value);
  else if (key == "s") c.s = parse_count(key, value);
  else if (key == "mutation_sigma") c.mutation_sigma = parse_real(key, value);
  else unknown_key("MNC", key);
}

void apply_rcs(RcsConfig& c, const std::string& key, const std::string& value) {
  if (key == "n_pop") c.n_pop = parse_count(key, value);
  else if (key == "n_elites") c.n_elites = parse_count(key, value);
  else if (key == "n_crossover") c.n_crossover = parse_count(key, value);
  else if (key == "n_mutation") c.n_mutation = parse_count(key, value);
  else if (key == "r_niche") c.r_niche = parse_real(key, value);
  else if (key == "mutation_sigma") c.mutation_sigma = parse_real(key, value);
  else unknown_key("RCS", key);
}

void apply_cab(CabConfig& c, const std::string& key, const std::string& value) {
  if (key == "n_pop") c.n_pop = parse_count(key, value);
  else if (key == "b") c.b = parse_count(key, value);
  else if (key == "h") c.h = parse_real(key, value);
  else if (key == "p") c.p = parse_real(key, value);
  else if (key == "v") c.v = parse_real(key, value);
  else if (key == "rho") c.rho = parse_real(key, value);
  else unknown_key("CAB", key);
}

std::string optional_count(const std::optional<std::size_t>& value) {
  return value ? std::to_string(*value) : std::string();
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  const std::string key = lower(name);
  if (key == "cmn") return Algorithm::kCmn;
  if (key == "mnc") return Algorithm::kMnc;
  if (key == "rcs") return Algorithm::kRcs;
  if (key == "cab") return Algorithm::kCab;
  throw ConfigError("unknown algorithm '" + name + "' (expected cmn, mnc, rcs or cab)");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kCmn:
      return "CMN";
    case Algorithm::kMnc:
      return "MNC";
    case Algorithm::kRcs:
      return "RCS";
    case Algorithm::kCab:
      return "CAB";
  }
  return "?";
}

std::string parse_objective(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "F1" || upper == "F2" || upper == "F3" || upper == "F4") return upper;
  throw ConfigError("unknown objective '" + name + "' (expected F1..F4)");
}

AlgorithmSettings default_settings(Algorithm algorithm, const std::string& objective) {
  const bool wide = is_paired_with_f3(objective);
  switch (algorithm) {
    case Algorithm::kCmn: {
      CmnSettings s;
      if (wide) {
        s.config.n_pop_init = 100;
        s.config.n_crossover = 20;
        s.config.n_mutation = 12;
        s.config.n_min = 6;
        s.config.n_crowd = 20;
        s.config.n_try = 100;
      }
      return s;
    }
    case Algorithm::kMnc:
      return wide ? MncConfig{200, 180, 20, 75, 4, 75} : MncConfig{};
    case Algorithm::kRcs:
      return wide ? RcsConfig{80, 30, 50, 30, 12.0} : RcsConfig{};
    case Algorithm::kCab:
      return wide ? CabConfig{200, 100, 0.6, 0.8, 0.001, 4.0} : CabConfig{};
  }
  throw ConfigError("unknown algorithm");
}

std::size_t default_budget(const std::string& objective) {
  return is_paired_with_f3(objective) ? 20000 : 2000;
}

std::vector<double> default_thresholds(const std::string& objective) {
  if (objective == "F1") return {0.1, 0.05, 0.01};
  if (objective == "F2") return {0.5, 0.1, 0.01};
  return {10.0, 1.0, 0.1};
}

std::pair<std::string, std::string> parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + text + "' is not key=value");
  std::string key = lower(trim(text.substr(0, eq)));
  std::string value = trim(text.substr(eq + 1));
  if (key.empty()) throw ConfigError("override '" + text + "' has an empty key");
  return {std::move(key), std::move(value)};
}

Overrides parse_config_text(std::istream& in) {
  Overrides out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      out.push_back(parse_override(line));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

Overrides read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config_text(in);
}

void apply_overrides(AlgorithmSettings& settings, const Overrides& overrides) {
  for (const auto& [raw_key, value] : overrides) {
    const std::string key = lower(raw_key);
    std::visit(
        [&](auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CmnSettings>) apply_cmn(s, key, value);
          else if constexpr (std::is_same_v<T, MncConfig>) apply_mnc(s, key, value);
          else if constexpr (std::is_same_v<T, RcsConfig>) apply_rcs(s, key, value);
          else apply_cab(s, key, value);
        },
        settings);
  }
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CmnSettings>) s.config.validate();
        else s.validate();
      },
      settings);
}

std::vector<std::string> known_keys(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kCmn:
      return {"n_pop", "n_crossover", "n_mutation", "n_min", "n_crowd", "n_try",
              "mutation_sigma", "threshold_scale", "threshold_offset",
              "threshold_decay_weight", "threshold_decay_base", "threshold_rule",
              "mate_ranking", "max_generations", "stall_generations"};
    case Algorithm::kMnc:
      return {"n_pop", "n_crossover", "n_mutation", "c_s", "c_f", "s", "mutation_sigma"};
    case Algorithm::kRcs:
      return {"n_pop", "n_elites", "n_crossover", "n_mutation", "r_niche", "mutation_sigma"};
    case Algorithm::kCab:
      return {"n_pop", "b", "h", "p", "v", "rho"};
  }
  return {};
}

// --- number formatting ---------------------------------------------------------

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format floating-point value");
  return std::string(buffer, ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::runtime_error("malformed number '" + text + "'");
  }
  return value;
}

// --- trace files -------------------------------------------------------------

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace) {
  out << kTraceHeader << '\n';
  for (const TracePoint& p : trace.points) {
    out << trace.algorithm << ',' << trace.objective << ',' << trace.run << ',' << trace.seed
        << ',' << p.generation << ',' << p.evals << ',' << format_double(p.metric_raw) << ','
        << format_double(p.metric_normalized) << '\n';
  }
}

ConvergenceTrace parse_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::runtime_error("trace file does not start with the expected header");
  }
  ConvergenceTrace trace;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 8) {
      throw std::runtime_error("trace line " + std::to_string(number) + " has " +
                               std::to_string(fields.size()) + " fields");
    }
    try {
      if (trace.points.empty()) {
        trace.algorithm = fields[0];
        trace.objective = fields[1];
        trace.run = parse_count("run", fields[2]);
        trace.seed = std::stoull(fields[3]);
      }
      TracePoint p;
      p.generation = parse_count("generation", fields[4]);
      p.evals = parse_count("evals", fields[5]);
      p.metric_raw = parse_double(fields[6]);
      p.metric_normalized = parse_double(fields[7]);
      p.metric_reported = p.metric_raw;
      trace.record(p);
    } catch (const std::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(number) + ": " + e.what());
    }
  }
  return trace;
}

// --- run logs and snapshots ------------------------------------------------------

void write_run_log(std::ostream& out, const Archive& archive,
                   std::span<const AdmissionRecord> log) {
  const std::size_t dim = archive.space().dim();
  out << "id,generation,phase";
  for (std::size_t i = 0; i < dim; ++i) out << ",x" << i;
  out << ",raw_fitness,nearest_id,nearest_scaled_fitness,threshold,nearest_distance\n";
  for (const AdmissionRecord& rec : log) {
    const Individual& ind = archive[rec.id];
    out << rec.id << ',' << rec.generation << ',' << to_string(rec.phase);
    for (double x : ind.genome) out << ',' << format_double(x);
    out << ',' << format_double(ind.raw_fitness) << ',' << rec.nearest_id << ','
        << format_double(rec.nearest_scaled_fitness) << ',' << format_double(rec.threshold)
        << ',' << format_double(rec.nearest_distance) << '\n';
  }
}

ParsedRunLog parse_run_log(std::istream& in, const DesignSpace& space) {
  const std::size_t dim = space.dim();
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty run log");
  ParsedRunLog parsed{Archive(space), {}};
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != dim + 8) {
      throw std::runtime_error("run log line " + std::to_string(number) + " has " +
                               std::to_string(f.size()) + " fields");
    }
    AdmissionRecord rec;
    rec.id = parse_count("id", f[0]);
    rec.generation = parse_count("generation", f[1]);
    if (f[2] == "init") rec.phase = AdmissionPhase::kInitial;
    else if (f[2] == "crossover") rec.phase = AdmissionPhase::kCrossover;
    else if (f[2] == "mutation") rec.phase = AdmissionPhase::kMutation;
    else throw std::runtime_error("run log line " + std::to_string(number) + ": bad phase");
    Genome genome(dim);
    for (std::size_t i = 0; i < dim; ++i) genome[i] = parse_double(f[3 + i]);
    const double fitness = parse_double(f[3 + dim]);
    rec.nearest_id = parse_count("nearest_id", f[4 + dim]);
    rec.nearest_scaled_fitness = parse_double(f[5 + dim]);
    rec.threshold = parse_double(f[6 + dim]);
    rec.nearest_distance = parse_double(f[7 + dim]);
    parsed.archive.add(std::move(genome), fitness, rec.generation, rec.threshold);
    parsed.log.push_back(rec);
  }
  return parsed;
}

void write_snapshot(std::ostream& out, std::span<const Individual> individuals,
                    std::size_t dim) {
  if (dim == 1) {
    out << "x";
  } else if (dim == 2) {
    out << "x,y";
  } else {
    for (std::size_t i = 0; i < dim; ++i) out << (i ? ",x" : "x") << i;
  }
  out << ",raw_fitness\n";
  for (const Individual& ind : individuals) {
    for (std::size_t i = 0; i < ind.genome.size(); ++i) {
      out << (i ? "," : "") << format_double(ind.genome[i]);
    }
    out << ',' << format_double(ind.raw_fitness) << '\n';
  }
}

// --- cells -----------------------------------------------------------------

CellResult run_cell(const CellSpec& spec) {
  const std::string name = parse_objective(spec.objective);
  Objective objective = make_benchmark(name, spec.objective_options);
  const ReferenceOptima optima = reference_optima(name, spec.objective_options);
  const std::size_t budget = spec.budget.value_or(default_budget(name));

  AlgorithmSettings settings = default_settings(spec.algorithm, name);
  apply_overrides(settings, spec.overrides);

  const bool exclude_shallow =
      name == "F4" && (spec.algorithm == Algorithm::kMnc || spec.algorithm == Algorithm::kCab);
  std::vector<std::size_t> excludes;
  if (exclude_shallow) excludes.push_back(kShallowPeakIndex);
  const MetricFn metric = make_metric(optima, objective.space(), excludes);

  RngStream rng(spec.seed);
  CellResult cell;
  const auto start = std::chrono::steady_clock::now();
  std::size_t generations = 0;
  if (const auto* cmn = std::get_if<CmnSettings>(&settings)) {
    RunLimits limits = cmn->limits;
    limits.budget = budget;
    CmnResult result = run_cmn(cmn->config, objective, limits, rng, metric);
    cell.trace = result.trace;
    cell.final_individuals.assign(result.archive.individuals().begin(),
                                  result.archive.individuals().end());
    generations = result.state.generation;
    cell.cmn = std::move(result);
  } else {
    ComparatorConfig config = std::visit(
        [](const auto& s) -> ComparatorConfig {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CmnSettings>) {
            throw std::logic_error("unreachable");
          } else {
            return s;
          }
        },
        settings);
    ComparatorResult result = run_comparator(config, objective, budget, rng, metric);
    cell.trace = result.trace;
    cell.final_individuals = result.survivors();
    generations = result.generations;
  }
  const auto stop = std::chrono::steady_clock::now();
  cell.trace.run = spec.run;

  RunSummary& s = cell.summary;
  s.algorithm = to_string(spec.algorithm);
  s.objective = name;
  s.run = spec.run;
  s.seed = spec.seed;
  s.evals = objective.eval_count();
  s.generations = generations;
  s.metric_raw = convergence_metric(cell.final_individuals, optima);
  s.metric_normalized =
      convergence_metric_normalized(cell.final_individuals, optima, objective.space());
  if (name == "F4") {
    const std::size_t shallow[] = {kShallowPeakIndex};
    s.metric_excluding_shallow =
        convergence_metric_excluding(cell.final_individuals, optima, shallow);
  }
  s.metric_reported = exclude_shallow ? *s.metric_excluding_shallow : s.metric_raw;
  for (double threshold : default_thresholds(name)) {
    s.evals_to_threshold.emplace_back(threshold, evals_to_threshold(cell.trace, threshold));
  }
  const PeakReport peaks = peak_report(cell.final_individuals, optima);
  s.peaks_found = peaks.found_count();
  s.peak_count = peaks.peaks.size();
  s.wall_seconds = std::chrono::duration<double>(stop - start).count();
  return cell;
}

std::string summary_header() {
  return "algorithm,objective,run,seed,evals,generations,metric_raw,metric_normalized,"
         "metric_excl_shallow,metric_reported,threshold_1,evals_1,threshold_2,evals_2,"
         "threshold_3,evals_3,peaks_found,peak_count,wall_seconds";
}

std::string summary_row(const RunSummary& s) {
  std::ostringstream out;
  out << s.algorithm << ',' << s.objective << ',' << s.run << ',' << s.seed << ',' << s.evals
      << ',' << s.generations << ',' << format_double(s.metric_raw) << ','
      << format_double(s.metric_normalized) << ','
      << (s.metric_excluding_shallow ? format_double(*s.metric_excluding_shallow) : "") << ','
      << format_double(s.metric_reported);
  for (std::size_t k = 0; k < 3; ++k) {
    if (k < s.evals_to_threshold.size()) {
      out << ',' << format_double(s.evals_to_threshold[k].first) << ','
          << optional_count(s.evals_to_threshold[k].second);
    } else {
      out << ",,";
    }
  }
  out << ',' << s.peaks_found << ',' << s.peak_count << ',' << format_double(s.wall_seconds);
  return out.str();
}

// --- bench -----------------------------------------------------------------

void BenchPlan::validate() const {
  if (algorithms.empty()) throw ConfigError("bench plan lists no algorithms");
  if (objectives.empty()) throw ConfigError("bench plan lists no objectives");
  if (repetitions < 1) throw ConfigError("bench plan needs at least one repetition");
  if (jobs < 1) throw ConfigError("bench plan needs at least one job");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + temp.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

std::string trace_filename(const std::string& algorithm, const std::string& objective,
                           std::size_t run) {
  return algorithm + "_" + objective + "_run" + std::to_string(run) + ".csv";
}

BenchReport run_bench(const BenchPlan& plan) {
  plan.validate();
  std::vector<std::string> objectives;
  for (const std::string& name : plan.objectives) objectives.push_back(parse_objective(name));

  std::vector<CellSpec> specs;
  for (Algorithm algorithm : plan.algorithms) {
    for (const std::string& objective : objectives) {
      for (std::size_t run = 0; run < plan.repetitions; ++run) {
        CellSpec spec;
        spec.algorithm = algorithm;
        spec.objective = objective;
        spec.run = run;
        spec.seed = plan.base_seed + run;
        spec.budget = plan.budget;
        spec.overrides = plan.overrides;
        spec.objective_options = plan.objective_options;
        specs.push_back(std::move(spec));
      }
    }
  }

  const std::filesystem::path traces = plan.output / "traces";
  const std::filesystem::path plots = plan.output / "plot";
  std::filesystem::create_directories(traces);
  std::filesystem::create_directories(plots);

  std::vector<std::optional<CellResult>> results(specs.size());
  std::vector<std::string> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < specs.size(); k = next++) {
      try {
        CellResult cell = run_cell(specs[k]);
        std::ostringstream trace;
        write_trace_csv(trace, cell.trace);
        write_file_atomic(traces / trace_filename(cell.summary.algorithm,
                                                  cell.summary.objective, specs[k].run),
                          trace.str());
        results[k] = std::move(cell);
      } catch (const std::exception& e) {
        errors[k] = to_string(specs[k].algorithm) + " " + specs[k].objective + " run " +
                    std::to_string(specs[k].run) + ": " + e.what();
      }
    }
  };
  const std::size_t jobs = std::min(plan.jobs, specs.size());
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  BenchReport report;
  report.cells = specs.size();
  std::ostringstream summary;
  summary << summary_header() << '\n';
  std::map<std::pair<std::string, std::string>, std::ostringstream> plot_files;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    if (!results[k]) {
      ++report.failures;
      report.errors.push_back(errors[k]);
      continue;
    }
    const CellResult& cell = *results[k];
    summary << summary_row(cell.summary) << '\n';
    auto& plot = plot_files[{cell.summary.algorithm, cell.summary.objective}];
    if (plot.tellp() == 0) plot << "run,seed,evals,metric_raw,metric_reported\n";
    for (const TracePoint& p : cell.trace.points) {
      plot << cell.trace.run << ',' << cell.trace.seed << ',' << p.evals << ','
           << format_double(p.metric_raw) << ',' << format_double(p.metric_reported) << '\n';
    }
  }
  for (auto& [key, content] : plot_files) {
    write_file_atomic(plots / (key.first + "_" + key.second + ".csv"), content.str());
  }
  write_file_atomic(plan.output / "summary.csv", summary.str());

  std::ostringstream meta;
  meta << "base_seed = " << plan.base_seed << "\n"
       << "seed_rule = base_seed + run\n"
       << "repetitions = " << plan.repetitions << "\n"
       << "foxholes_form = "
       << (plan.objective_options.foxholes == FoxholesForm::kLiteral ? "literal" : "classic")
       << "\n";
  for (const std::string& objective : objectives) {
    const DesignSpace space = benchmark_space(objective);
    meta << objective << ".budget = " << plan.budget.value_or(default_budget(objective))
         << (plan.budget ? "\n" : " (calibration default)\n");
    meta << objective << ".domain =";
    for (std::size_t i = 0; i < space.dim(); ++i) {
      meta << " [" << format_double(space.lower(i)) << ", " << format_double(space.upper(i))
           << "]";
    }
    meta << "\n";
  }
  for (const auto& [key, value] : plan.overrides) meta << "override." << key << " = " << value << "\n";
  write_file_atomic(plan.output / "metadata.txt", meta.str());
  if (!report.errors.empty()) {
    std::ostringstream err;
    for (const std::string& e : report.errors) err << e << '\n';
    write_file_atomic(plan.output / "errors.txt", err.str());
  }
  return report;
}

}  // namespace cmn::bench
