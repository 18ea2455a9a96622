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
#include <vector>

#include <gtest/gtest.h>

#include "sasgd/errors.h"
#include "sasgd/numkit.h"

namespace sasgd {
namespace {

constexpr std::size_t kDraws = 1000000;

TEST(VectorOps, BasicValues) {
  EXPECT_EQ(norm_sq(DenseVector{3.0, 4.0}), 25.0);
  EXPECT_EQ(dot(DenseVector{1.0, 2.0}, DenseVector{3.0, 4.0}), 11.0);
  DenseVector y{1.0, 1.0};
  axpy(2.0, DenseVector{1.0, -1.0}, y);
  EXPECT_EQ(y, (DenseVector{3.0, -1.0}));
}

TEST(VectorOps, LengthMismatchThrows) {
  EXPECT_THROW(dot(DenseVector{1.0}, DenseVector{1.0, 2.0}), ArgumentError);
  DenseVector y(3);
  EXPECT_THROW(axpy(1.0, DenseVector(2), y), ArgumentError);
}

TEST(VectorOps, CosineSelfAndScale) {
  RngStream rng(7, streams::kProbe);
  for (int rep = 0; rep < 100; ++rep) {
    DenseVector u(9), v(9);
    for (std::size_t i = 0; i < 9; ++i) {
      u[i] = sample_standard_normal(rng);
      v[i] = sample_standard_normal(rng);
    }
    EXPECT_NEAR(cosine_similarity(u, u), 1.0, 1e-15);
    const double c = cosine_similarity(u, v);
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
    const double a = 0.1 + 5.0 * rng.uniform_open();
    const double b = 0.1 + 5.0 * rng.uniform_open();
    EXPECT_NEAR(cosine_similarity(scaled(u, a), scaled(v, b)), c, 1e-12);
  }
}

TEST(VectorOps, CosineZeroVectorIsUndefined) {
  EXPECT_THROW(cosine_similarity(DenseVector{0.0, 0.0}, DenseVector{1.0, 0.0}),
               UndefinedValueError);
}

TEST(Rng, SameSeedAndStreamReplays) {
  RngStream a(42, 5), b(42, 5);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, StreamsDiffer) {
  RngStream a(42, 0), b(42, 1), c(43, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    same_ab += x == b.next_u64();
    same_ac += x == c.next_u64();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(Rng, UniformOpenStaysInside) {
  RngStream rng(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowIsRoughlyUniform) {
  RngStream rng(3, 0);
  std::vector<int> counts(10);
  for (int i = 0; i < 100000; ++i) ++counts[rng.below(10)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);  // ~4 sd
}

TEST(Exponential, InverseCdfIdentity) {
  const double rate = 3.5;
  EXPECT_NEAR(exponential_from_uniform(std::exp(-1.0), rate), 1.0 / rate, 1e-15);
}

TEST(Exponential, MeanOfMillionDraws) {
  RngStream rng(11, 0);
  double s = 0.0;
  for (std::size_t i = 0; i < kDraws; ++i) s += sample_exponential(rng, 2.0);
  EXPECT_NEAR(s / kDraws, 0.5, 0.01);
}

TEST(Exponential, RejectsNonPositiveRate) {
  RngStream rng(0, 0);
  EXPECT_THROW(sample_exponential(rng, 0.0), ArgumentError);
  EXPECT_THROW(sample_exponential(rng, -1.0), ArgumentError);
}

TEST(Lognormal, DegenerateIsExact) {
  RngStream rng(0, 0);
  EXPECT_EQ(sample_lognormal(rng, 0.0, 0.0), 1.0);
  EXPECT_EQ(sample_lognormal(rng, 0.7, 0.0), std::exp(0.7));
}

TEST(Lognormal, MedianOfMillionDraws) {
  RngStream rng(12, 0);
  std::vector<double> v(kDraws);
  for (auto& x : v) x = sample_lognormal(rng, 0.0, 1.0);
  std::nth_element(v.begin(), v.begin() + kDraws / 2, v.end());
  EXPECT_NEAR(v[kDraws / 2], 1.0, 0.02);
}

TEST(Lognormal, PositiveAndRejectsNegativeVariance) {
  RngStream rng(13, 0);
  for (int i = 0; i < 10000; ++i) ASSERT_GT(sample_lognormal(rng, 0.0, 0.1), 0.0);
  EXPECT_THROW(sample_lognormal(rng, 0.0, -0.1), ArgumentError);
}

TEST(Uniform, DegenerateAndMean) {
  RngStream rng(14, 0);
  EXPECT_EQ(sample_uniform(rng, 1.0, 1.0), 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const double u = sample_uniform(rng, 0.9, 1.1);
    ASSERT_GE(u, 0.9);
    ASSERT_LE(u, 1.1);
    s += u;
  }
  EXPECT_NEAR(s / kDraws, 1.0, 0.001);
  EXPECT_THROW(sample_uniform(rng, 2.0, 1.0), ArgumentError);
}

TEST(Normal, MomentsWithinThreeStandardErrors) {
  RngStream rng(15, 0);
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    const double z = sample_standard_normal(rng);
    s += z;
    s2 += z * z;
  }
  const double se = 1.0 / std::sqrt(static_cast<double>(kDraws));
  EXPECT_NEAR(s / kDraws, 0.0, 3.0 * se);
  EXPECT_NEAR(s2 / kDraws, 1.0, 3.0 * std::sqrt(2.0) * se);
}

}  // namespace
}  // namespace sasgd
