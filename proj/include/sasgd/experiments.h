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
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sasgd/config.h"
#include "sasgd/objectives.h"
#include "sasgd/simulator.h"

namespace sasgd {

// Directory holding mnist/ (compiled in, overridable with SASGD_DATA_DIR).
std::string data_dir();

struct Problem {
  std::shared_ptr<const Objective> objective;
  std::shared_ptr<const Dataset> test;  // null for the quadratic
};

// Builds (or reuses) the objective a config describes. Datasets are cached
// process-wide by path, so grid cells share one copy.
Problem build_problem(const RunConfig& cfg);
SimulationSpec make_spec(const RunConfig& cfg, const Problem& problem);

struct RunOutcome {
  RunConfig config;
  RunResult result;
  std::optional<double> accuracy;
  double final_loss = 0.0;
  double avg_staleness = 0.0;
  double wall_seconds = 0.0;
};

RunOutcome run_config(const RunConfig& cfg);
std::string records_csv(const RunOutcome& outcome, bool header = true);
std::string summary_json(const RunOutcome& outcome);

// Writes `content` to a temporary sibling file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

struct CellReport {
  std::size_t cell = 0;
  std::vector<std::pair<std::string, ConfigValue>> values;
  Variant variant = Variant::kAsgd;
  double lr = 0.0;
  double rho = 1.0;
  std::size_t workers = 1;
  std::vector<std::optional<double>> accuracy;  // per repeat
  std::vector<double> avg_staleness;
  std::vector<std::optional<double>> mu_hat;
  std::vector<double> final_loss;
  std::string csv;  // all repeats, repeat order, one header

  std::optional<double> mean_accuracy() const;
  std::optional<double> std_accuracy() const;
  std::optional<double> mean_mu_hat() const;
};

struct GridReport {
  std::vector<CellReport> cells;
  // Index into `cells` of the best cell per variant (highest mean accuracy,
  // ties to the smaller learning rate).
  std::vector<std::pair<Variant, std::size_t>> best;
};

// Runs every cell x repeat on `jobs` threads. When `out_dir` is non-empty,
// writes cell-<i>.csv per cell plus summary.csv / summary.json.
GridReport run_grid(const GridSpec& grid, std::size_t jobs, const std::string& out_dir);
std::string grid_summary_csv(const GridReport& report);
std::string grid_summary_json(const GridReport& report);

// --- staleness study ------------------------------------------------------

struct StalenessStudy {
  std::vector<double> per_seed_avg;
  std::vector<std::size_t> per_seed_max;
  std::map<std::size_t, std::size_t> histogram;  // pooled over seeds
  double mean_avg = 0.0;
};

// Delay-only runs (the objective is irrelevant to staleness).
StalenessStudy staleness_study(std::size_t workers, const DelayConfig& delay,
                               std::size_t updates, const std::vector<std::uint64_t>& seeds);

// --- bound verification ---------------------------------------------------

struct BoundStudyOptions {
  std::vector<std::size_t> workers = {1, 8};
  std::vector<double> rhos = {0.1, 1.0};
  std::vector<std::size_t> horizons = {100, 1000, 10000};
  std::size_t seeds = 5;
  double delay_variance = 0.1;
  std::size_t pilot_horizon = 10000;
  std::uint64_t pilot_seed = 1000;
  std::size_t batch_size = 8;
  std::size_t sample_period = 10;
  std::size_t variance_draws = 4000;
};

struct BoundRow {
  std::size_t workers = 0;
  double rho = 0.0;
  std::size_t horizon = 0;
  double mu = 0.0;
  double lipschitz = 0.0;
  double grad_variance = 0.0;
  double lambda = 0.0;
  double c = 0.0;
  double min_grad_norm_sq = 0.0;
  double theorem = 0.0;
  double corollary = 0.0;
  bool applicable = true;
};

struct BoundGroup {
  std::size_t workers = 0;
  double rho = 0.0;
  double slope = 0.0;
  std::vector<BoundRow> rows;
};

// The non-convex quadratic used for bound checks (d = 50).
std::shared_ptr<QuadraticObjective> bound_objective();
std::vector<BoundGroup> bound_study(const BoundStudyOptions& opts);

// --- verify suites ---------------------------------------------------------

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

const std::vector<std::string>& suite_names();
// Throws ArgumentError for an unknown suite.
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

}  // namespace sasgd
