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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sasgd/numkit.h"

namespace sasgd {

enum class DelayModelKind { kExponential, kConstant, kScripted };

std::string to_string(DelayModelKind kind);
DelayModelKind delay_model_from_string(const std::string& name);

struct DelayConfig {
  DelayModelKind kind = DelayModelKind::kExponential;
  // Variance of ln(rate) across workers. Not the gradient variance.
  double delay_variance = 0.1;
  double compute_lo = 0.9;
  double compute_hi = 1.1;
  // Cycle length for kConstant.
  double constant_delay = 1.0;
  // "worker_id delay" lines for kScripted.
  std::string script_path;
  std::uint64_t seed = 0;

  // Throws ConfigError naming the bad field.
  void validate() const;
};

struct WorkerTimingProfile {
  std::size_t worker_id = 0;
  double rate = 1.0;
};

// rate_i = exp(Z_i), Z_i ~ N(0, delay_variance), drawn in worker order from
// the delay-profile stream of cfg.seed.
std::vector<WorkerTimingProfile> build_profiles(const DelayConfig& cfg, std::size_t n_workers);
double next_comm_delay(const WorkerTimingProfile& profile, RngStream& rng);
double next_compute_time(const DelayConfig& cfg, RngStream& rng);

/// Source of per-worker cycle lengths: the time from a worker receiving a
/// model to its gradient reaching the PS.
class DelaySource {
 public:
  virtual ~DelaySource() = default;
  virtual double next_cycle(std::size_t worker) = 0;
};

// Compute time U[lo, hi] plus Exp(rate_i) communication delay, each worker on
// its own stream.
class ExponentialDelaySource : public DelaySource {
 public:
  ExponentialDelaySource(const DelayConfig& cfg, std::size_t n_workers);
  double next_cycle(std::size_t worker) override;
  const std::vector<WorkerTimingProfile>& profiles() const { return profiles_; }

 private:
  DelayConfig cfg_;
  std::vector<WorkerTimingProfile> profiles_;
  std::vector<RngStream> rngs_;
};

// Every cycle takes the same time for every worker.
class ConstantDelaySource : public DelaySource {
 public:
  explicit ConstantDelaySource(double cycle);
  double next_cycle(std::size_t) override { return cycle_; }

 private:
  double cycle_;
};

// Replays fixed delays. The j-th pair naming worker w is w's j-th cycle.
// Running out of delays for a worker throws ConfigError.
class ScriptedDelaySource : public DelaySource {
 public:
  ScriptedDelaySource(std::size_t n_workers,
                      const std::vector<std::pair<std::size_t, double>>& script);
  static ScriptedDelaySource from_file(std::size_t n_workers, const std::string& path);
  double next_cycle(std::size_t worker) override;

 private:
  std::vector<std::vector<double>> per_worker_;
  std::vector<std::size_t> cursor_;
};

// '#' starts a comment; blank lines are skipped.
std::vector<std::pair<std::size_t, double>> read_delay_script(const std::string& path);

std::unique_ptr<DelaySource> make_delay_source(const DelayConfig& cfg, std::size_t n_workers);

}  // namespace sasgd
