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
#include <memory>

#include <gtest/gtest.h>

#include "sasgd/errors.h"
#include "sasgd/optimizer.h"
#include "sasgd/simulator.h"

namespace sasgd {
namespace {

TEST(Schedule, PlugInValues) {
  const auto inv = LrSchedule::inverse_sqrt(1.0, 1.0, 1.0);
  EXPECT_EQ(lr_at(inv, 0), 1.0);
  EXPECT_EQ(lr_at(inv, 3), 0.5);
  EXPECT_EQ(lr_at(LrSchedule::horizon_constant(1.0, 1.0, 1.0, 4), 0), 0.5);
  EXPECT_EQ(lr_at(LrSchedule::horizon_constant(1.0, 1.0, 1.0, 4), 99), 0.5);
  EXPECT_EQ(lr_at(LrSchedule::constant(0.01), 12345), 0.01);
  EXPECT_NEAR(lr_at(LrSchedule::inverse_sqrt(0.5, 0.8, 4.0), 8), 0.5 * 0.8 / (4.0 * 3.0), 1e-17);
}

TEST(Schedule, InverseSqrtStrictlyDecreasing) {
  const auto s = LrSchedule::inverse_sqrt(0.3, 0.7, 2.0);
  double prev = lr_at(s, 0);
  for (std::size_t t = 1; t < 100000; ++t) {
    const double cur = lr_at(s, t);
    ASSERT_LT(cur, prev) << t;
    ASSERT_GT(cur, 0.0);
    prev = cur;
  }
}

TEST(Schedule, InvalidParametersThrow) {
  EXPECT_THROW(LrSchedule::constant(0.0).validate(), ArgumentError);
  EXPECT_THROW(LrSchedule::horizon_constant(1.0, 1.0, 1.0, 0).validate(), ArgumentError);
  EXPECT_THROW(LrSchedule::inverse_sqrt(1.0, 0.0, 1.0).validate(), ArgumentError);
  EXPECT_THROW(LrSchedule::inverse_sqrt(1.0, 1.0, -1.0).validate(), ArgumentError);
}

TEST(Variants, NamesRoundTrip) {
  for (Variant v : {Variant::kAsgd, Variant::kPhiSgd, Variant::kPhiMemSgd}) {
    EXPECT_EQ(variant_from_string(to_string(v)), v);
  }
  EXPECT_THROW(variant_from_string("SGD"), ArgumentError);
}

TEST(Apply, AsgdOneStep) {
  UpdateRule rule(Variant::kAsgd, 2, 2, 0.0);
  const auto r = apply_update(rule, DenseVector{1.0, 1.0}, DenseVector{1.0, 0.0}, nullptr, 0.5);
  EXPECT_EQ(r.x_next, (DenseVector{0.5, 1.0}));
  EXPECT_TRUE(std::holds_alternative<DenseVector>(r.transmitted));
}

TEST(Apply, PhiSgdMovesOnlyTopCoordinate) {
  UpdateRule rule(Variant::kPhiSgd, 2, 1, 0.0);
  const auto r = apply_update(rule, DenseVector{1.0, 1.0}, DenseVector{3.0, 1.0}, nullptr, 1.0);
  EXPECT_EQ(r.x_next, (DenseVector{-2.0, 1.0}));
  EXPECT_EQ(std::get<SparseUpdate>(r.transmitted), SparseUpdate(2, {{0, 3.0}}));
}

TEST(Apply, PhiMemTwoStepTraceMatchesMemoryCombine) {
  UpdateRule rule(Variant::kPhiMemSgd, 2, 1, 0.0);
  MemoryState mem(2);
  auto r1 = apply_update(rule, DenseVector{0.0, 0.0}, DenseVector{3.0, 1.0}, &mem, 1.0);
  EXPECT_EQ(r1.x_next, (DenseVector{-3.0, 0.0}));
  EXPECT_EQ(mem.vector(), (DenseVector{0.0, 1.0}));
  auto r2 = apply_update(rule, r1.x_next, DenseVector{0.5, 1.0}, &mem, 1.0);
  EXPECT_EQ(std::get<SparseUpdate>(r2.transmitted), SparseUpdate(2, {{1, 2.0}}));
  EXPECT_EQ(r2.x_next, (DenseVector{-3.0, -2.0}));
  EXPECT_EQ(mem.vector(), (DenseVector{0.5, 0.0}));
}

TEST(Apply, MemoryPresenceMustMatchVariant) {
  UpdateRule mem_rule(Variant::kPhiMemSgd, 2, 1, 0.0);
  EXPECT_THROW(mem_rule.encode(DenseVector{1.0, 2.0}, nullptr), ConfigError);
  UpdateRule plain(Variant::kPhiSgd, 2, 1, 0.0);
  MemoryState m(2);
  EXPECT_THROW(plain.encode(DenseVector{1.0, 2.0}, &m), ConfigError);
}

TEST(Apply, FullKSparsifiedVariantsEqualAsgdBitExact) {
  RngStream rng(1, streams::kProbe);
  UpdateRule a(Variant::kAsgd, 20, 20, 0.9);
  UpdateRule b(Variant::kPhiSgd, 20, 20, 0.9);
  UpdateRule c(Variant::kPhiMemSgd, 20, 20, 0.9);
  MemoryState mem(20);
  DenseVector xa(20, 1.0), xb = xa, xc = xa;
  for (int s = 0; s < 200; ++s) {
    DenseVector g(20);
    for (auto& v : g) v = sample_standard_normal(rng);
    xa = apply_update(a, xa, g, nullptr, 0.05).x_next;
    xb = apply_update(b, xb, g, nullptr, 0.05).x_next;
    xc = apply_update(c, xc, g, &mem, 0.05).x_next;
    ASSERT_EQ(xa, xb);
    ASSERT_EQ(xa, xc);
    ASSERT_EQ(mem.vector(), DenseVector(20));
  }
}

TEST(Apply, MomentumAccumulatesAfterSparsification) {
  UpdateRule rule(Variant::kPhiSgd, 3, 1, 0.5);
  DenseVector x(3);
  rule.apply(x, top_k(DenseVector{0.0, 2.0, 1.0}, 1), 1.0);
  EXPECT_EQ(x, (DenseVector{0.0, -2.0, 0.0}));
  rule.apply(x, top_k(DenseVector{0.0, 0.0, 4.0}, 1), 1.0);
  // v = 0.5 * [0,2,0] + [0,0,4]
  EXPECT_EQ(rule.velocity(), (DenseVector{0.0, 1.0, 4.0}));
  EXPECT_EQ(x, (DenseVector{0.0, -3.0, -4.0}));
}

TEST(Descent, AllVariantsConvergeWithoutStaleness) {
  auto q = synthetic_quadratic(8, 20, {1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4}, 4, 1.0, 0.0, 3.0);
  for (Variant v : {Variant::kAsgd, Variant::kPhiSgd, Variant::kPhiMemSgd}) {
    SimulationSpec spec;
    spec.objective = q;
    spec.variant = v;
    spec.rho = 1.0;
    spec.workers = 1;
    spec.batch_size = 20;
    spec.updates = 10000;
    spec.momentum = 0.0;
    spec.lr = LrSchedule::constant(1.0 / 2.4);
    spec.sample_period = 1000;
    const RunResult r = run_simulation(spec);
    EXPECT_LE(std::sqrt(*r.final_full_grad_norm_sq), 1e-6) << to_string(v);
    EXPECT_EQ(r.max_staleness, 0u);
  }
}

}  // namespace
}  // namespace sasgd
