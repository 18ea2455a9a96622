// Copyright 2026 The sasgd Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================
// Command-line front end: simulate, grid, verify, staleness-hist.
//
// Exit status: 0 ok, 1 a verification or run failed, 2 usage/config error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sasgd/config.h"
#include "sasgd/errors.h"
#include "sasgd/experiments.h"
#include "sasgd/metrics.h"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

namespace fs = std::filesystem;

int cmd_simulate(const std::string& config, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
  sasgd::RunConfig cfg = sasgd::load_run_config(config);
  if (seed) cfg.seed = *seed;
  const sasgd::RunOutcome o = sasgd::run_config(cfg);
  const fs::path dir(out_dir);
  sasgd::write_file_atomic((dir / (cfg.run_id + ".csv")).string(), sasgd::records_csv(o));
  const std::string summary = sasgd::summary_json(o);
  sasgd::write_file_atomic((dir / (cfg.run_id + ".json")).string(), summary);
  std::cout << summary;
  return kOk;
}

int cmd_grid(const std::string& config, const std::string& out_dir, std::size_t jobs,
             std::optional<std::uint64_t> seed) {
  sasgd::GridSpec grid = sasgd::load_grid_spec(config);
  if (seed) {
    bool replaced = false;
    for (auto& [k, v] : grid.base) {
      if (k == "seed") {
        v.v = static_cast<std::int64_t>(*seed);
        replaced = true;
      }
    }
    if (!replaced) grid.base.emplace_back("seed", sasgd::ConfigValue{static_cast<std::int64_t>(*seed)});
  }
  const sasgd::GridReport report = sasgd::run_grid(grid, jobs, out_dir);
  std::cout << sasgd::grid_summary_csv(report);
  for (const auto& [variant, idx] : report.best) {
    const auto& c = report.cells[idx];
    std::cout << "best " << sasgd::to_string(variant) << ": cell " << c.cell << " lr "
              << sasgd::format_double(c.lr) << " rho " << sasgd::format_double(c.rho)
              << " acc " << (c.mean_accuracy() ? sasgd::format_double(*c.mean_accuracy()) : "n/a")
              << '\n';
  }
  return kOk;
}

int cmd_verify(const std::string& suite, const std::string& out, std::uint64_t seed) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = sasgd::suite_names();
  } else {
    const auto& known = sasgd::suite_names();
    if (std::find(known.begin(), known.end(), suite) == known.end()) {
      std::cerr << "unknown suite '" << suite << "'; expected all";
      for (const auto& n : known) std::cerr << ", " << n;
      std::cerr << '\n';
      return kUsage;
    }
    names = {suite};
  }
  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  bool all_ok = true;
  for (const auto& name : names) {
    const sasgd::SuiteResult r = sasgd::run_suite(name, seed);
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    report.push_back({{"suite", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    all_ok = all_ok && r.passed;
  }
  if (!out.empty()) sasgd::write_file_atomic(out, report.dump(2) + "\n");
  return all_ok ? kOk : kFailure;
}

int cmd_staleness_hist(const std::string& config, const std::string& out,
                       std::optional<std::uint64_t> seed) {
  sasgd::RunConfig cfg = sasgd::load_run_config(config);
  if (seed) cfg.seed = *seed;
  const sasgd::Problem problem = sasgd::build_problem(cfg);
  sasgd::DelayConfig delay = cfg.delay;
  delay.script_path = cfg.resolve(delay.script_path);
  const auto study = sasgd::staleness_study(cfg.workers, delay,
                                            cfg.budget(problem.objective->num_samples()), {cfg.seed});
  std::ostringstream csv;
  csv << "staleness,count\n";
  for (const auto& [tau, count] : study.histogram) csv << tau << ',' << count << '\n';
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    sasgd::write_file_atomic(out, csv.str());
  }
  std::cerr << "avg_staleness " << sasgd::format_double(study.mean_avg) << " max_staleness "
            << study.per_seed_max.front() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous sparsified SGD simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string sim_out;
  std::string grid_out;
  std::string verify_out;
  std::string hist_out;
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string suite;

  auto* sim = app.add_subcommand("simulate", "Run one configuration; write CSV + JSON summary");
  sim->add_option("--config", config, "Run config file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "Output directory")->default_val("out");
  sim->add_option("--seed", seed, "Override the config seed");

  auto* grid = app.add_subcommand("grid", "Run a grid of configurations");
  grid->add_option("--config", config, "Grid config file")->required()->check(CLI::ExistingFile);
  grid->add_option("--out", grid_out, "Output directory")->default_val("out");
  grid->add_option("--jobs", jobs, "Parallel runs")->default_val(1)->check(CLI::PositiveNumber);
  grid->add_option("--seed", seed, "Override the base seed");

  auto* verify = app.add_subcommand("verify", "Run property suites");
  verify->add_option("suite", suite, "Suite name or 'all'")->required();
  verify->add_option("--out", verify_out, "Write a JSON report here");
  verify->add_option("--seed", seed, "Seed for randomized suites");

  auto* hist = app.add_subcommand("staleness-hist", "Staleness histogram of a configuration");
  hist->add_option("--config", config, "Run config file")->required()->check(CLI::ExistingFile);
  hist->add_option("--out", hist_out, "Output CSV (stdout if omitted)");
  hist->add_option("--seed", seed, "Override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(config, sim_out, seed);
    if (*grid) return cmd_grid(config, grid_out, jobs, seed);
    if (*verify) return cmd_verify(suite, verify_out, seed.value_or(0));
    if (*hist) return cmd_staleness_hist(config, hist_out, seed);
  } catch (const sasgd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const sasgd::ArgumentError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
