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
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace sasgd {

/// Fixed-length vector of doubles: models, gradients, memory vectors.
///
/// The length is chosen at construction (must be >= 1) and never changes.
class DenseVector {
 public:
  explicit DenseVector(std::size_t dim, double fill = 0.0);
  DenseVector(std::initializer_list<double> values);
  explicit DenseVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  void fill(double value);
  bool all_finite() const;

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<double> values_;
};

double dot(const DenseVector& a, const DenseVector& b);
double norm_sq(const DenseVector& a);
double norm(const DenseVector& a);
// y <- y + alpha * x
void axpy(double alpha, const DenseVector& x, DenseVector& y);
DenseVector scaled(const DenseVector& x, double alpha);
DenseVector subtract(const DenseVector& a, const DenseVector& b);
// Throws UndefinedValueError when either vector is zero.
double cosine_similarity(const DenseVector& a, const DenseVector& b);

// Well-known stream ids. Worker i uses kWorkerStreamBase + i.
namespace streams {
inline constexpr std::uint64_t kData = 0;
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kDelayProfile = 2;
inline constexpr std::uint64_t kProbe = 3;
inline constexpr std::uint64_t kWorkerStreamBase = 1024;
}  // namespace streams

/// Deterministic random stream identified by (seed, stream_id).
///
/// Backed by std::mt19937_64 seeded through std::seed_seq; both algorithms
/// are fixed by the C++ standard, so a given (seed, stream_id) yields the same
/// 64-bit sequence on every conforming platform. Not thread-safe: one owner.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform_open();
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

// Mix two 64-bit words into a derived seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

double exponential_from_uniform(double u, double rate);
double sample_exponential(RngStream& rng, double rate);
double sample_standard_normal(RngStream& rng);
double sample_lognormal(RngStream& rng, double mean_log, double var_log);
double sample_uniform(RngStream& rng, double lo, double hi);

}  // namespace sasgd
