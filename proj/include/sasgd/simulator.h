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
#include <vector>

#include "sasgd/delaymodel.h"
#include "sasgd/metrics.h"
#include "sasgd/numkit.h"
#include "sasgd/objectives.h"
#include "sasgd/optimizer.h"

namespace sasgd {

struct SimulationSpec {
  std::shared_ptr<const Objective> objective;
  Variant variant = Variant::kAsgd;
  double rho = 1.0;
  std::size_t workers = 1;
  DelayConfig delay;
  // Overrides `delay` when set; consumed by the run.
  std::shared_ptr<DelaySource> delay_source;
  std::size_t batch_size = 64;
  std::size_t updates = 0;
  LrSchedule lr = LrSchedule::constant(0.01);
  double momentum = 0.0;
  std::uint64_t seed = 0;
  // Full gradient every `sample_period` updates; 0 disables sampling.
  std::size_t sample_period = 0;
  // Also evaluate the full gradient at the stale model at sampled updates.
  bool track_stale_norms = false;
  std::size_t mu_window = 0;
  // Keep x_0..x_T (replay checks on small problems only).
  bool keep_iterates = false;
  // Starting point; drawn from the init stream when unset.
  std::optional<DenseVector> x0;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct StalenessRecord {
  std::size_t update = 0;  // 1-based PS version produced
  std::size_t staleness = 0;
  double arrival_time = 0.0;
};

struct RunResult {
  DenseVector x0{1};
  DenseVector final_x{1};
  std::vector<RunRecord> records;
  std::vector<StalenessRecord> staleness;
  std::optional<double> final_full_grad_norm_sq;
  std::optional<double> final_mu_hat;
  std::size_t max_staleness = 0;
  double sim_time = 0.0;
  std::vector<DenseVector> iterates;
};

// Runs the event loop to completion. Deterministic in (spec, seed).
RunResult run_simulation(const SimulationSpec& spec);

std::map<std::size_t, std::size_t> staleness_histogram(const std::vector<StalenessRecord>& records);
// Throws ArgumentError on empty input.
double avg_staleness(const std::vector<StalenessRecord>& records);

}  // namespace sasgd
