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
#include "sasgd/delaymodel.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sasgd/errors.h"

namespace sasgd {

std::string to_string(DelayModelKind kind) {
  switch (kind) {
    case DelayModelKind::kExponential: return "exponential";
    case DelayModelKind::kConstant: return "constant";
    case DelayModelKind::kScripted: return "scripted";
  }
  return "?";
}

DelayModelKind delay_model_from_string(const std::string& name) {
  if (name == "exponential") return DelayModelKind::kExponential;
  if (name == "constant") return DelayModelKind::kConstant;
  if (name == "scripted") return DelayModelKind::kScripted;
  throw ConfigError("delay.model", "unknown delay model '" + name + "'");
}

void DelayConfig::validate() const {
  if (!(delay_variance >= 0.0) || !std::isfinite(delay_variance)) {
    throw ConfigError("delay.variance", "must be >= 0");
  }
  if (!(compute_lo >= 0.0)) throw ConfigError("delay.compute_lo", "must be >= 0");
  if (!(compute_lo <= compute_hi) || !std::isfinite(compute_hi)) {
    throw ConfigError("delay.compute_hi", "must be >= compute_lo");
  }
  if (kind == DelayModelKind::kConstant && !(constant_delay > 0.0)) {
    throw ConfigError("delay.constant", "must be > 0");
  }
  if (kind == DelayModelKind::kScripted && script_path.empty()) {
    throw ConfigError("delay.script", "scripted delay model needs a script path");
  }
}

std::vector<WorkerTimingProfile> build_profiles(const DelayConfig& cfg, std::size_t n_workers) {
  cfg.validate();
  RngStream rng(cfg.seed, streams::kDelayProfile);
  std::vector<WorkerTimingProfile> out(n_workers);
  for (std::size_t i = 0; i < n_workers; ++i) {
    out[i].worker_id = i;
    out[i].rate = sample_lognormal(rng, 0.0, cfg.delay_variance);
  }
  return out;
}

double next_comm_delay(const WorkerTimingProfile& profile, RngStream& rng) {
  return sample_exponential(rng, profile.rate);
}

double next_compute_time(const DelayConfig& cfg, RngStream& rng) {
  return sample_uniform(rng, cfg.compute_lo, cfg.compute_hi);
}

ExponentialDelaySource::ExponentialDelaySource(const DelayConfig& cfg, std::size_t n_workers)
    : cfg_(cfg), profiles_(build_profiles(cfg, n_workers)) {
  rngs_.reserve(n_workers);
  for (std::size_t i = 0; i < n_workers; ++i) {
    rngs_.emplace_back(cfg.seed, streams::kWorkerStreamBase + i);
  }
}

double ExponentialDelaySource::next_cycle(std::size_t worker) {
  RngStream& rng = rngs_.at(worker);
  const double compute = next_compute_time(cfg_, rng);
  return compute + next_comm_delay(profiles_[worker], rng);
}

ConstantDelaySource::ConstantDelaySource(double cycle) : cycle_(cycle) {
  if (!(cycle > 0.0)) throw ArgumentError("constant delay must be > 0");
}

ScriptedDelaySource::ScriptedDelaySource(
    std::size_t n_workers, const std::vector<std::pair<std::size_t, double>>& script)
    : per_worker_(n_workers), cursor_(n_workers, 0) {
  for (const auto& [w, delay] : script) {
    if (w >= n_workers) {
      throw ConfigError("delay.script", "worker id " + std::to_string(w) + " >= workers");
    }
    if (!(delay >= 0.0) || !std::isfinite(delay)) {
      throw ConfigError("delay.script", "delays must be finite and >= 0");
    }
    per_worker_[w].push_back(delay);
  }
}

ScriptedDelaySource ScriptedDelaySource::from_file(std::size_t n_workers, const std::string& path) {
  return ScriptedDelaySource(n_workers, read_delay_script(path));
}

double ScriptedDelaySource::next_cycle(std::size_t worker) {
  auto& c = cursor_.at(worker);
  if (c >= per_worker_[worker].size()) {
    throw ConfigError("delay.script", "script exhausted for worker " + std::to_string(worker));
  }
  return per_worker_[worker][c++];
}

std::vector<std::pair<std::size_t, double>> read_delay_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("delay.script", "cannot open " + path);
  std::vector<std::pair<std::size_t, double>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    long long w;
    double delay;
    if (!(ss >> w)) continue;
    std::string rest;
    if (!(ss >> delay) || (ss >> rest) || w < 0) {
      throw ConfigError("delay.script",
                        path + ":" + std::to_string(lineno) + ": expected 'worker_id delay'");
    }
    out.emplace_back(static_cast<std::size_t>(w), delay);
  }
  return out;
}

std::unique_ptr<DelaySource> make_delay_source(const DelayConfig& cfg, std::size_t n_workers) {
  cfg.validate();
  switch (cfg.kind) {
    case DelayModelKind::kExponential:
      return std::make_unique<ExponentialDelaySource>(cfg, n_workers);
    case DelayModelKind::kConstant:
      return std::make_unique<ConstantDelaySource>(cfg.constant_delay);
    case DelayModelKind::kScripted:
      return std::make_unique<ScriptedDelaySource>(
          ScriptedDelaySource::from_file(n_workers, cfg.script_path));
  }
  return nullptr;
}

}  // namespace sasgd
