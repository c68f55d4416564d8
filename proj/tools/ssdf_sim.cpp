// Command-line front end: scenario runs, sweeps and critical-value caches.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ssdf/critical_table.hpp"
#include "ssdf/harness.hpp"

namespace {

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::string out;
  unsigned threads = 1;
  std::string cache;
};

ssdf::CriticalValueTable open_table(const std::string& cache, std::int64_t replications,
                                    std::uint64_t seed) {
  ssdf::CriticalValueTable table({replications, seed, true});
  if (!cache.empty() && std::filesystem::exists(cache)) table.load(cache);
  return table;
}

int run_command(const RunOptions& opt, bool whole_sweep) {
  ssdf::ScenarioConfig config = ssdf::load_config(opt.config);
  if (opt.seed) config.seed = *opt.seed;
  if (opt.trials) config.trials = *opt.trials;
  config.validate();

  ssdf::CriticalValueTable table =
      open_table(opt.cache, config.table_replications, config.table_seed);
  const std::size_t before = table.size();

  std::vector<ssdf::SweepPoint> points;
  if (whole_sweep) {
    points = ssdf::run_scenario(config, table, opt.threads);
  } else {
    points.push_back({ssdf::sweep_value(config, 0), ssdf::run_point(config, 0, table, opt.threads)});
  }

  if (!opt.cache.empty() && table.size() != before) table.save(opt.cache);
  if (opt.out.empty()) {
    ssdf::write_csv(std::cout, points, config.seed);
  } else {
    ssdf::emit_csv(points, config.seed, opt.out);
  }
  return 0;
}

void add_run_flags(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--config", opt.config, "Scenario file (key = value)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seed, "Override the scenario seed");
  cmd->add_option("--trials", opt.trials, "Override the trial count per point");
  cmd->add_option("--out", opt.out, "CSV output path (stdout when omitted)");
  cmd->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--cache", opt.cache, "Critical-value cache file (loaded, extended, saved)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative spectrum sensing under data-falsification attacks"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run the first operating point of a scenario");
  add_run_flags(run, run_opt);

  RunOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "Run every sweep point of a scenario");
  add_run_flags(sweep, sweep_opt);

  std::string cache;
  ssdf::Index n_min = 4, n_max = 20;
  double alpha = 0.05;
  std::int64_t replications = ssdf::CriticalValueTable::Options{}.replications;
  std::uint64_t seed = ssdf::CriticalValueTable::Options{}.seed;
  unsigned threads = 1;
  std::vector<std::string> kinds = {"tm_upper", "tm_lower", "tm_residual", "sw"};
  auto* table_cmd = app.add_subcommand("table", "Build or refresh the critical-value cache");
  table_cmd->add_option("--cache,--out", cache, "Cache file to extend")->required();
  table_cmd->add_option("--n-min", n_min, "Smallest sample size")->check(CLI::Range(3, 50));
  table_cmd->add_option("--n-max,--n", n_max, "Largest sample size")->check(CLI::Range(3, 50));
  table_cmd->add_option("--alpha", alpha, "Significance level");
  table_cmd->add_option("--replications", replications, "Monte Carlo replications per cell");
  table_cmd->add_option("--seed", seed, "Table seed");
  table_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  table_cmd->add_option("--kinds", kinds,
                        "Statistics: tm_upper tm_lower tm_residual sw tm_upper_half "
                        "tm_lower_half sw_upper_half sw_lower_half");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(run_opt, false);
    if (*sweep) return run_command(sweep_opt, true);
    if (*table_cmd) {
      ssdf::CriticalValueTable table = open_table(cache, replications, seed);
      for (const auto& name : kinds) {
        const ssdf::CriticalKind kind = ssdf::critical_kind_from_string(name);
        for (ssdf::Index n = n_min; n <= n_max; ++n) {
          const ssdf::Index m = ssdf::statistic_sample_size(kind, n);
          const bool sw = !ssdf::depends_on_block_size(kind);
          if (sw ? m < 3 : m < 2) continue;
          const ssdf::Index t_max = sw ? 0 : std::min(n / 2, m - 1);
          table.build(kind, n, sw ? 0 : 1, t_max, alpha, threads);
        }
      }
      table.save(cache);
      std::cerr << "critical-value cache: " << table.size() << " entries in " << cache << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
