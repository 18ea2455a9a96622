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
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <gtest/gtest.h>

#include "sasgd/delaymodel.h"
#include "sasgd/errors.h"

namespace sasgd {
namespace {

TEST(Profiles, ZeroVarianceGivesUnitRates) {
  DelayConfig cfg;
  cfg.delay_variance = 0.0;
  for (const auto& p : build_profiles(cfg, 16)) EXPECT_EQ(p.rate, 1.0);
}

TEST(Profiles, MedianRateIsOne) {
  DelayConfig cfg;
  cfg.delay_variance = 1.0;
  cfg.seed = 3;
  auto profiles = build_profiles(cfg, 100000);
  std::vector<double> rates;
  for (const auto& p : profiles) rates.push_back(p.rate);
  std::nth_element(rates.begin(), rates.begin() + 50000, rates.end());
  EXPECT_NEAR(rates[50000], 1.0, 0.02);
}

TEST(Profiles, SameSeedSameProfiles) {
  DelayConfig cfg;
  cfg.delay_variance = 3.0;
  cfg.seed = 11;
  const auto a = build_profiles(cfg, 8);
  const auto b = build_profiles(cfg, 8);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(a[i].rate, b[i].rate);
    EXPECT_EQ(a[i].worker_id, i);
  }
  cfg.seed = 12;
  EXPECT_NE(build_profiles(cfg, 8)[0].rate, a[0].rate);
}

TEST(CommDelay, MeanIsInverseRate) {
  RngStream rng(4, streams::kWorkerStreamBase);
  const WorkerTimingProfile p{0, 2.0};
  double s = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double d = next_comm_delay(p, rng);
    ASSERT_GT(d, 0.0);
    s += d;
  }
  EXPECT_NEAR(s / n, 0.5, 0.005);
  RngStream a(9, 1), b(9, 1);
  EXPECT_EQ(next_comm_delay(p, a), next_comm_delay(p, b));
}

TEST(ComputeTime, SupportAndMean) {
  RngStream rng(5, streams::kWorkerStreamBase);
  DelayConfig one;
  one.compute_lo = one.compute_hi = 1.0;
  EXPECT_EQ(next_compute_time(one, rng), 1.0);
  DelayConfig none;
  none.compute_lo = none.compute_hi = 0.0;
  EXPECT_EQ(next_compute_time(none, rng), 0.0);
  DelayConfig def;
  double s = 0.0;
  for (int i = 0; i < 1000000; ++i) s += next_compute_time(def, rng);
  EXPECT_NEAR(s / 1e6, 1.0, 0.001);
}

TEST(DelayConfigCheck, RejectsBadValues) {
  DelayConfig c;
  c.delay_variance = -1.0;
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "delay.variance");
  }
  DelayConfig d;
  d.compute_lo = 2.0;
  d.compute_hi = 1.0;
  EXPECT_THROW(d.validate(), ConfigError);
  DelayConfig e;
  e.compute_lo = -0.5;
  EXPECT_THROW(e.validate(), ConfigError);
}

TEST(Sources, ExponentialIsReproducibleAndIndependentOfOtherWorkers) {
  DelayConfig cfg;
  cfg.seed = 7;
  ExponentialDelaySource a(cfg, 4), b(cfg, 4);
  // Interleaving draws across workers must not change a worker's sequence.
  std::vector<double> w2a, w2b;
  for (int i = 0; i < 10; ++i) {
    a.next_cycle(0);
    w2a.push_back(a.next_cycle(2));
  }
  for (int i = 0; i < 10; ++i) w2b.push_back(b.next_cycle(2));
  EXPECT_EQ(w2a, w2b);
}

TEST(Sources, ConstantAndScripted) {
  ConstantDelaySource c(2.5);
  EXPECT_EQ(c.next_cycle(0), 2.5);
  EXPECT_EQ(c.next_cycle(7), 2.5);
  ScriptedDelaySource s(2, {{0, 1.0}, {1, 4.0}, {0, 2.0}});
  EXPECT_EQ(s.next_cycle(1), 4.0);
  EXPECT_EQ(s.next_cycle(0), 1.0);
  EXPECT_EQ(s.next_cycle(0), 2.0);
  EXPECT_THROW(s.next_cycle(0), ConfigError);
  EXPECT_THROW(ScriptedDelaySource(2, {{2, 1.0}}), ConfigError);
}

TEST(Sources, ScriptFileParsing) {
  const auto path = std::filesystem::temp_directory_path() / "sasgd-delays-test.txt";
  {
    std::ofstream f(path);
    f << "# header\n0 1.5\n\n1 2   # trailing\n";
  }
  const auto script = read_delay_script(path.string());
  ASSERT_EQ(script.size(), 2u);
  EXPECT_EQ(script[0], (std::pair<std::size_t, double>{0, 1.5}));
  EXPECT_EQ(script[1], (std::pair<std::size_t, double>{1, 2.0}));
  {
    std::ofstream f(path);
    f << "0 x\n";
  }
  EXPECT_THROW(read_delay_script(path.string()), ConfigError);
  std::filesystem::remove(path);
  EXPECT_THROW(read_delay_script(path.string()), ConfigError);
}

TEST(Sources, FactoryAndKindNames) {
  DelayConfig cfg;
  cfg.kind = DelayModelKind::kConstant;
  cfg.constant_delay = 3.0;
  EXPECT_EQ(make_delay_source(cfg, 2)->next_cycle(1), 3.0);
  for (auto k : {DelayModelKind::kExponential, DelayModelKind::kConstant,
                 DelayModelKind::kScripted}) {
    EXPECT_EQ(delay_model_from_string(to_string(k)), k);
  }
  EXPECT_THROW(delay_model_from_string("poisson"), ConfigError);
}

}  // namespace
}  // namespace sasgd
