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
#include "sasgd/simulator.h"

#include <queue>
#include <tuple>

#include "sasgd/errors.h"
#include "sasgd/sparsifier.h"

namespace sasgd {

namespace {

struct Arrival {
  double time;
  std::size_t worker;
  std::uint64_t seq;
};

// Earliest time first; ties by worker id, then insertion order.
struct Later {
  bool operator()(const Arrival& a, const Arrival& b) const {
    return std::tie(a.time, a.worker, a.seq) > std::tie(b.time, b.worker, b.seq);
  }
};

struct WorkerSim {
  std::size_t held_version = 0;
  DenseVector held_x;
  std::optional<MemoryState> memory;
};

}  // namespace

void SimulationSpec::validate() const {
  if (!objective) throw ConfigError("objective", "no objective");
  if (workers == 0) throw ConfigError("workers", "must be >= 1");
  if (updates == 0) throw ConfigError("updates", "update budget must be >= 1");
  if (batch_size == 0) throw ConfigError("batch_size", "must be >= 1");
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho", "must be in (0, 1]");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum", "must be in [0, 1)");
  if (x0 && x0->size() != objective->dim()) throw ConfigError("x0", "length != objective dim");
  if (!delay_source) delay.validate();
  try {
    lr.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError("lr", e.what());
  }
}

RunResult run_simulation(const SimulationSpec& spec) {
  spec.validate();
  const Objective& obj = *spec.objective;
  const std::size_t d = obj.dim();
  const std::size_t n = obj.num_samples();
  const std::size_t k = spec.variant == Variant::kAsgd ? d : k_from_rho(spec.rho, d);

  RunResult result;
  if (spec.x0) {
    result.x0 = *spec.x0;
  } else {
    RngStream init(spec.seed, streams::kInit);
    result.x0 = obj.initial_point(init);
  }
  DenseVector x = result.x0;

  std::shared_ptr<DelaySource> delays = spec.delay_source;
  if (!delays) {
    DelayConfig dc = spec.delay;
    dc.seed = spec.seed;
    delays = make_delay_source(dc, spec.workers);
  }

  UpdateRule rule(spec.variant, d, k, spec.momentum);
  std::vector<WorkerSim> workers;
  workers.reserve(spec.workers);
  for (std::size_t i = 0; i < spec.workers; ++i) {
    workers.push_back({0, x, std::nullopt});
    if (spec.variant == Variant::kPhiMemSgd) workers.back().memory.emplace(d);
  }

  std::priority_queue<Arrival, std::vector<Arrival>, Later> queue;
  std::uint64_t seq = 0;
  for (std::size_t i = 0; i < spec.workers; ++i) {
    queue.push({delays->next_cycle(i), i, seq++});
  }

  RngStream data_rng(spec.seed, streams::kData);
  MuEstimate mu(spec.mu_window);
  DenseVector g(d);
  if (spec.keep_iterates) result.iterates.push_back(x);
  result.records.reserve(spec.updates);
  result.staleness.reserve(spec.updates);

  for (std::size_t t = 0; t < spec.updates; ++t) {
    const Arrival a = queue.top();
    queue.pop();
    WorkerSim& w = workers[a.worker];

    // The worker's model has not changed since it was received, so the
    // gradient it started computing then can be evaluated now.
    const auto batch = sample_minibatch(n, spec.batch_size, data_rng);
    RunRecord rec;
    rec.t = t;
    rec.worker = a.worker;
    rec.sim_time = a.time;
    rec.staleness = t - w.held_version;
    rec.train_loss = obj.evaluate(w.held_x, batch, &g);
    rec.mb_grad_norm_sq = norm_sq(g);
    rec.eta = lr_at(spec.lr, t);

    const Transmission u = rule.encode(g, w.memory ? &*w.memory : nullptr);

    if (spec.sample_period > 0 && t % spec.sample_period == 0) {
      const DenseVector full = obj.full_gradient(x);
      rec.full_grad_norm_sq = norm_sq(full);
      if (spec.track_stale_norms) {
        rec.stale_full_grad_norm_sq =
            rec.staleness == 0 ? *rec.full_grad_norm_sq : norm_sq(obj.full_gradient(w.held_x));
      }
      if (mu.update(u, full)) rec.cos_t = mu.last_cosine();
      rec.mu_hat = mu.value();
    }

    rule.apply(x, u, rec.eta);

    result.staleness.push_back({t + 1, rec.staleness, a.time});
    result.max_staleness = std::max(result.max_staleness, rec.staleness);
    result.sim_time = a.time;
    result.records.push_back(std::move(rec));
    if (spec.keep_iterates) result.iterates.push_back(x);

    w.held_x = x;
    w.held_version = t + 1;
    if (t + 1 < spec.updates) {
      queue.push({a.time + delays->next_cycle(a.worker), a.worker, seq++});
    }
  }

  if (spec.sample_period > 0) result.final_full_grad_norm_sq = norm_sq(obj.full_gradient(x));
  result.final_mu_hat = mu.value();
  result.final_x = std::move(x);
  return result;
}

std::map<std::size_t, std::size_t> staleness_histogram(const std::vector<StalenessRecord>& records) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& r : records) ++hist[r.staleness];
  return hist;
}

double avg_staleness(const std::vector<StalenessRecord>& records) {
  if (records.empty()) throw ArgumentError("avg_staleness: no records");
  double s = 0.0;
  for (const auto& r : records) s += static_cast<double>(r.staleness);
  return s / static_cast<double>(records.size());
}

}  // namespace sasgd
