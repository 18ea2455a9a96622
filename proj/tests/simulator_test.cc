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
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "sasgd/errors.h"
#include "sasgd/experiments.h"
#include "sasgd/metrics.h"
#include "sasgd/simulator.h"

namespace sasgd {
namespace {

SimulationSpec small_spec(std::size_t workers, std::size_t updates) {
  SimulationSpec s;
  s.objective = synthetic_quadratic(6, 50, {1.0, 1.2, 1.4, 1.6, 1.8, 2.0}, 2, 1.0, 0.5, 1.0);
  s.workers = workers;
  s.updates = updates;
  s.batch_size = 4;
  s.lr = LrSchedule::constant(0.05);
  s.seed = 17;
  return s;
}

std::vector<std::size_t> taus(const RunResult& r) {
  std::vector<std::size_t> out;
  for (const auto& s : r.staleness) out.push_back(s.staleness);
  return out;
}

TEST(Simulator, ScriptedThreeWorkerExample) {
  auto spec = small_spec(3, 5);
  spec.delay_source = std::make_shared<ScriptedDelaySource>(
      3, std::vector<std::pair<std::size_t, double>>{
             {0, 1.0}, {1, 2.0}, {2, 3.0}, {0, 2.5}, {1, 2.0}, {2, 10.0}, {0, 10.0}});
  const RunResult r = run_simulation(spec);
  EXPECT_EQ(taus(r), (std::vector<std::size_t>{0, 1, 2, 2, 2}));
  std::vector<std::size_t> workers;
  for (const auto& rec : r.records) workers.push_back(rec.worker);
  EXPECT_EQ(workers, (std::vector<std::size_t>{0, 1, 2, 0, 1}));
}

TEST(Simulator, SingleWorkerIsSequential) {
  const RunResult r = run_simulation(small_spec(1, 300));
  for (auto t : taus(r)) ASSERT_EQ(t, 0u);
  const auto hist = staleness_histogram(r.staleness);
  ASSERT_EQ(hist.size(), 1u);
  EXPECT_EQ(hist.at(0), 300u);
  EXPECT_EQ(avg_staleness(r.staleness), 0.0);
}

// Hand simulation of equal cycle times: every worker finishes in id order each
// round, so after the first round each update is N - 1 versions old.
std::vector<std::size_t> round_robin_oracle(std::size_t n, std::size_t updates) {
  std::vector<std::size_t> held(n, 0), out;
  for (std::size_t t = 0; t < updates; ++t) {
    const std::size_t w = t % n;
    out.push_back(t - held[w]);
    held[w] = t + 1;
  }
  return out;
}

TEST(Simulator, HomogeneousWorkersMatchRoundRobin) {
  for (std::size_t n : {2, 3, 4}) {
    auto spec = small_spec(n, 60);
    spec.delay.kind = DelayModelKind::kConstant;
    const RunResult r = run_simulation(spec);
    EXPECT_EQ(taus(r), round_robin_oracle(n, 60)) << n;
    const auto hist = staleness_histogram(r.staleness);
    EXPECT_EQ(hist.rbegin()->first, n - 1);
    EXPECT_EQ(hist.rbegin()->second, 60 - (n - 1));
    // With equal timing every worker's first update lands in the first round.
    for (std::size_t i = 0; i < n; ++i) EXPECT_LE(r.staleness[i].staleness, n - 1);
  }
}

TEST(Simulator, BookkeepingInvariants) {
  auto spec = small_spec(8, 500);
  spec.delay.delay_variance = 3.0;
  const RunResult r = run_simulation(spec);
  ASSERT_EQ(r.staleness.size(), 500u);
  ASSERT_EQ(r.records.size(), 500u);
  std::set<std::size_t> seen;
  double prev_time = 0.0;
  std::size_t max_tau = 0;
  for (std::size_t i = 0; i < r.staleness.size(); ++i) {
    const auto& s = r.staleness[i];
    EXPECT_EQ(s.update, i + 1);
    EXPECT_LE(s.staleness, i);
    EXPECT_GE(s.arrival_time, prev_time);
    prev_time = s.arrival_time;
    max_tau = std::max(max_tau, s.staleness);
    const std::size_t w = r.records[i].worker;
    // A worker's first update was computed on x0.
    if (seen.insert(w).second) EXPECT_EQ(s.staleness, i);
  }
  EXPECT_EQ(r.max_staleness, max_tau);
  const auto hist = staleness_histogram(r.staleness);
  std::size_t total = 0;
  double weighted = 0.0;
  for (const auto& [tau, count] : hist) {
    total += count;
    weighted += static_cast<double>(tau * count);
  }
  EXPECT_EQ(total, 500u);
  EXPECT_NEAR(weighted / 500.0, avg_staleness(r.staleness), 1e-12);
}

TEST(Simulator, DeterministicGivenSeed) {
  auto spec = small_spec(5, 400);
  spec.variant = Variant::kPhiMemSgd;
  spec.rho = 0.5;
  spec.sample_period = 10;
  const RunResult a = run_simulation(spec);
  const RunResult b = run_simulation(spec);
  EXPECT_EQ(a.final_x, b.final_x);
  EXPECT_EQ(taus(a), taus(b));
  EXPECT_EQ(a.final_mu_hat, b.final_mu_hat);
  spec.seed = 18;
  EXPECT_NE(run_simulation(spec).final_x, a.final_x);
}

TEST(Simulator, ConfigurationErrors) {
  auto spec = small_spec(0, 10);
  EXPECT_THROW(run_simulation(spec), ConfigError);
  spec = small_spec(2, 0);
  EXPECT_THROW(run_simulation(spec), ConfigError);
  spec = small_spec(2, 10);
  spec.rho = 0.0;
  EXPECT_THROW(run_simulation(spec), ConfigError);
}

TEST(Simulator, StaleNormsReplayOracle) {
  auto spec = small_spec(2, 200);
  spec.delay.kind = DelayModelKind::kConstant;
  spec.sample_period = 1;
  spec.track_stale_norms = true;
  spec.keep_iterates = true;
  const RunResult r = run_simulation(spec);
  ASSERT_EQ(r.iterates.size(), 201u);
  // Brute force from the stored iterates.
  double stale = 0.0, fresh = 0.0;
  for (const auto& rec : r.records) {
    const double eta = lr_at(spec.lr, rec.t);
    const DenseVector& x_now = r.iterates[rec.t];
    const DenseVector& x_old = r.iterates[rec.t - rec.staleness];
    stale += eta * eta * norm_sq(spec.objective->full_gradient(x_old));
    fresh += eta * eta * norm_sq(spec.objective->full_gradient(x_now));
  }
  const double want = std::max(0.0, stale - fresh);
  const double got = estimate_C(r.records, spec.lr, 200);
  EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, want));
  EXPECT_GT(got, 0.0);

  auto single = small_spec(1, 100);
  single.sample_period = 5;
  single.track_stale_norms = true;
  EXPECT_EQ(estimate_C(run_simulation(single).records, single.lr, 100), 0.0);
}

TEST(Simulator, SampledFieldsOnlyAtPeriod) {
  auto spec = small_spec(3, 35);
  spec.sample_period = 10;
  const RunResult r = run_simulation(spec);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.full_grad_norm_sq.has_value(), rec.t % 10 == 0) << rec.t;
    EXPECT_EQ(rec.mu_hat.has_value(), rec.t % 10 == 0);
  }
  EXPECT_TRUE(r.final_full_grad_norm_sq.has_value());
}

TEST(Simulator, WorkerCountDoesNotPerturbDataOrInit) {
  auto a = small_spec(1, 1);
  auto b = small_spec(7, 1);
  const RunResult ra = run_simulation(a);
  const RunResult rb = run_simulation(b);
  EXPECT_EQ(ra.x0, rb.x0);
  // Both first updates use batch 0 of the shared data stream at x0.
  EXPECT_EQ(ra.records[0].train_loss, rb.records[0].train_loss);
}

TEST(Scalability, ManyWorkersDoNotBeatOne) {
  double acc1 = 0.0, acc128 = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    RunConfig cfg;
    cfg.objective = ObjectiveKind::kMlp;
    cfg.hidden = 128;
    cfg.epochs = 2;
    cfg.seed = seed;
    cfg.workers = 1;
    acc1 += *run_config(cfg).accuracy;
    cfg.workers = 128;
    acc128 += *run_config(cfg).accuracy;
  }
  EXPECT_LE(acc128, acc1);
}

}  // namespace
}  // namespace sasgd
