// Benchmark harness: single runs, full benchmark plans and population
// snapshots for the cumulative multi-niching GA and its comparators.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmn/bench.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitRuntime = 4;

std::filesystem::path default_output() {
  if (const char* env = std::getenv("CMN_BENCH_OUT"); env && *env) return env;
  return "bench_out";
}

struct CellOptions {
  std::string algorithm;
  std::string objective;
  std::uint64_t seed = 1;
  std::size_t budget = 0;
  std::string out;
  std::vector<std::string> sets;
  std::string config_file;
  bool classic_foxholes = false;
};

void add_cell_options(CLI::App* cmd, CellOptions& o) {
  cmd->add_option("--alg", o.algorithm, "Algorithm: cmn, mnc, rcs or cab")->required();
  cmd->add_option("--fn", o.objective, "Objective: F1, F2, F3 or F4")->required();
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--budget", o.budget, "Objective evaluation budget (default per objective)");
  cmd->add_option("--out", o.out, "Output directory (default $CMN_BENCH_OUT or ./bench_out)");
  cmd->add_option("--set", o.sets, "Parameter override key=value (repeatable)");
  cmd->add_option("--config", o.config_file, "Parameter file of 'key = value' lines");
  cmd->add_flag("--classic-foxholes", o.classic_foxholes,
                "Use hole-index denominators in F3 (unequal peak heights)");
}

cmn::bench::CellSpec make_spec(const CellOptions& o) {
  cmn::bench::CellSpec spec;
  spec.algorithm = cmn::bench::parse_algorithm(o.algorithm);
  spec.objective = cmn::bench::parse_objective(o.objective);
  spec.seed = o.seed;
  if (o.budget > 0) spec.budget = o.budget;
  if (!o.config_file.empty()) spec.overrides = cmn::bench::read_config_file(o.config_file);
  for (const std::string& s : o.sets) spec.overrides.push_back(cmn::bench::parse_override(s));
  if (o.classic_foxholes) spec.objective_options.foxholes = cmn::FoxholesForm::kClassic;
  return spec;
}

std::filesystem::path output_dir(const std::string& out) {
  std::filesystem::path dir = out.empty() ? default_output() : std::filesystem::path(out);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string stem(const cmn::bench::CellSpec& spec) {
  return cmn::bench::to_string(spec.algorithm) + "_" + spec.objective + "_seed" +
         std::to_string(spec.seed);
}

int command_run(const CellOptions& o) {
  const cmn::bench::CellSpec spec = make_spec(o);
  const auto dir = output_dir(o.out);
  const cmn::bench::CellResult cell = cmn::bench::run_cell(spec);

  std::ostringstream trace;
  cmn::bench::write_trace_csv(trace, cell.trace);
  cmn::bench::write_file_atomic(dir / (stem(spec) + "_trace.csv"), trace.str());
  if (cell.cmn) {
    std::ostringstream log;
    cmn::bench::write_run_log(log, cell.cmn->archive, cell.cmn->log);
    cmn::bench::write_file_atomic(dir / (stem(spec) + "_runlog.csv"), log.str());
  }
  std::cout << cmn::bench::summary_header() << '\n'
            << cmn::bench::summary_row(cell.summary) << '\n';
  return 0;
}

int command_snapshot(const CellOptions& o) {
  const cmn::bench::CellSpec spec = make_spec(o);
  const auto dir = output_dir(o.out);
  const cmn::bench::CellResult cell = cmn::bench::run_cell(spec);
  std::ostringstream rows;
  const std::size_t dim = cmn::benchmark_space(spec.objective).dim();
  cmn::bench::write_snapshot(rows, cell.final_individuals, dim);
  const auto path = dir / (stem(spec) + "_snapshot.csv");
  cmn::bench::write_file_atomic(path, rows.str());
  std::cout << path.string() << ": " << cell.final_individuals.size() << " individuals, "
            << cell.summary.peaks_found << "/" << cell.summary.peak_count << " peaks found\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal optimization benchmark harness"};
  app.require_subcommand(1);

  CellOptions run_options;
  CLI::App* run = app.add_subcommand("run", "Run one algorithm on one objective");
  add_cell_options(run, run_options);

  CellOptions snapshot_options;
  CLI::App* snapshot =
      app.add_subcommand("snapshot", "Write the final population of one run for plotting");
  add_cell_options(snapshot, snapshot_options);

  std::vector<std::string> bench_algorithms{"cmn", "mnc", "rcs", "cab"};
  std::vector<std::string> bench_objectives{"F1", "F2", "F3", "F4"};
  std::size_t repetitions = 10;
  std::size_t bench_budget = 0;
  std::uint64_t base_seed = 1;
  std::size_t jobs = 1;
  std::string bench_out;
  std::vector<std::string> bench_sets;
  std::string bench_config;
  bool bench_classic = false;
  CLI::App* bench = app.add_subcommand("bench", "Run a full algorithm x objective x run plan");
  bench->add_option("--alg", bench_algorithms, "Algorithms (comma separated)")->delimiter(',');
  bench->add_option("--fn", bench_objectives, "Objectives (comma separated)")->delimiter(',');
  bench->add_option("--runs", repetitions, "Repetitions per cell");
  bench->add_option("--budget", bench_budget, "Evaluation budget (default per objective)");
  bench->add_option("--seed", base_seed, "Base seed; run k uses base + k");
  bench->add_option("--jobs", jobs, "Parallel cells");
  bench->add_option("--out", bench_out, "Output directory (default $CMN_BENCH_OUT or ./bench_out)");
  bench->add_option("--set", bench_sets, "Parameter override key=value (repeatable)");
  bench->add_option("--config", bench_config, "Parameter file of 'key = value' lines");
  bench->add_flag("--classic-foxholes", bench_classic, "Use hole-index denominators in F3");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (run->parsed()) return command_run(run_options);
    if (snapshot->parsed()) return command_snapshot(snapshot_options);

    cmn::bench::BenchPlan plan;
    if (bench_algorithms.empty()) {
      std::cerr << "error: bench needs at least one algorithm\n";
      return kExitUsage;
    }
    for (const std::string& a : bench_algorithms) {
      plan.algorithms.push_back(cmn::bench::parse_algorithm(a));
    }
    plan.objectives = bench_objectives;
    plan.repetitions = repetitions;
    if (bench_budget > 0) plan.budget = bench_budget;
    plan.base_seed = base_seed;
    plan.jobs = jobs;
    plan.output = output_dir(bench_out);
    if (!bench_config.empty()) plan.overrides = cmn::bench::read_config_file(bench_config);
    for (const std::string& s : bench_sets) plan.overrides.push_back(cmn::bench::parse_override(s));
    if (bench_classic) plan.objective_options.foxholes = cmn::FoxholesForm::kClassic;
    const cmn::bench::BenchReport report = cmn::bench::run_bench(plan);
    std::cout << report.cells << " cells, " << report.failures << " failed; output in "
              << plan.output.string() << '\n';
    for (const std::string& e : report.errors) std::cerr << e << '\n';
    return report.failures == 0 ? 0 : kExitRuntime;
  } catch (const cmn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    // Unknown algorithm/objective names are usage errors.
    const std::string what = e.what();
    if (what.rfind("unknown algorithm", 0) == 0 || what.rfind("unknown objective", 0) == 0 ||
        what.find("lists no") != std::string::npos) {
      return kExitUsage;
    }
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
