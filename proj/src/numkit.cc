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
#include "sasgd/numkit.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sasgd/errors.h"

namespace sasgd {

namespace {

void require_same_length(const DenseVector& a, const DenseVector& b,
                         const char* op) {
  if (a.size() != b.size()) {
    throw ArgumentError(std::string(op) + ": length mismatch (" +
                        std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
  }
}

}  // namespace

DenseVector::DenseVector(std::size_t dim, double fill) : values_(dim, fill) {
  if (dim == 0) throw ArgumentError("DenseVector: length must be >= 1");
}

DenseVector::DenseVector(std::initializer_list<double> values)
    : values_(values) {
  if (values_.empty()) throw ArgumentError("DenseVector: length must be >= 1");
}

DenseVector::DenseVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw ArgumentError("DenseVector: length must be >= 1");
}

void DenseVector::fill(double value) {
  for (double& v : values_) v = value;
}

bool DenseVector::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double dot(const DenseVector& a, const DenseVector& b) {
  require_same_length(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(const DenseVector& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double norm(const DenseVector& a) { return std::sqrt(norm_sq(a)); }

void axpy(double alpha, const DenseVector& x, DenseVector& y) {
  require_same_length(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

DenseVector scaled(const DenseVector& x, double alpha) {
  DenseVector out = x;
  for (double& v : out) v *= alpha;
  return out;
}

DenseVector subtract(const DenseVector& a, const DenseVector& b) {
  require_same_length(a, b, "subtract");
  DenseVector out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] -= b[i];
  return out;
}

double cosine_similarity(const DenseVector& a, const DenseVector& b) {
  require_same_length(a, b, "cosine_similarity");
  const double na = norm_sq(a);
  const double nb = norm_sq(b);
  if (na == 0.0 || nb == 0.0) {
    throw UndefinedValueError("cosine_similarity: zero vector");
  }
  // sqrt(na * nb) rather than norm(a) * norm(b): exact 1 for a == b.
  const double c = dot(a, b) / std::sqrt(na * nb);
  return std::clamp(c, -1.0, 1.0);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform_open() {
  // (m + 0.5) / 2^53 with m in [0, 2^53): never 0, never 1.
  const std::uint64_t m = engine_() >> 11;
  return (static_cast<double>(m) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("RngStream::below: n must be > 0");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r = engine_();
  while (r >= limit) r = engine_();
  return r % n;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double exponential_from_uniform(double u, double rate) {
  if (!(rate > 0.0)) throw ArgumentError("exponential: rate must be > 0");
  if (!(u > 0.0 && u < 1.0)) throw ArgumentError("exponential: u not in (0,1)");
  return -std::log(u) / rate;
}

double sample_exponential(RngStream& rng, double rate) {
  if (!(rate > 0.0)) throw ArgumentError("exponential: rate must be > 0");
  return exponential_from_uniform(rng.uniform_open(), rate);
}

double sample_standard_normal(RngStream& rng) {
  // Box-Muller, one variate per pair of uniforms.
  const double u1 = rng.uniform_open();
  const double u2 = rng.uniform_open();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sample_lognormal(RngStream& rng, double mean_log, double var_log) {
  if (!(var_log >= 0.0)) throw ArgumentError("lognormal: var_log must be >= 0");
  if (var_log == 0.0) return std::exp(mean_log);
  return std::exp(mean_log + std::sqrt(var_log) * sample_standard_normal(rng));
}

double sample_uniform(RngStream& rng, double lo, double hi) {
  if (!(lo <= hi)) throw ArgumentError("uniform: lo must be <= hi");
  if (lo == hi) return lo;
  return lo + (hi - lo) * rng.uniform_open();
}

}  // namespace sasgd
