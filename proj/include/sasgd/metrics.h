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
#include <deque>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sasgd/numkit.h"
#include "sasgd/optimizer.h"

namespace sasgd {

/// One row per PS update. t is the 0-based update index: the PS turns x_t
/// into x_{t+1} using a gradient computed at x_{t - staleness}.
struct RunRecord {
  std::size_t t = 0;
  std::size_t staleness = 0;
  std::size_t worker = 0;
  double sim_time = 0.0;
  double eta = 0.0;
  double train_loss = 0.0;  // minibatch loss at the worker's model
  double mb_grad_norm_sq = 0.0;
  // Filled only at sampled updates.
  std::optional<double> full_grad_norm_sq;        // at x_t
  std::optional<double> stale_full_grad_norm_sq;  // at x_{t - staleness}
  std::optional<double> cos_t;
  std::optional<double> mu_hat;
};

/// Ratio estimate of the expected cosine between the transmitted update and
/// the full gradient:
///   mu_hat = sum <u, grad f> / sum |u| |grad f|
/// over the last `window` accepted samples (window 0 = all of them).
class MuEstimate {
 public:
  explicit MuEstimate(std::size_t window = 0) : window_(window) {}

  // Returns false (and leaves the estimate unchanged) when either vector is
  // zero, e.g. at an exact stationary point.
  bool update(const Transmission& u, const DenseVector& full_grad);
  bool update(double inner, double norm_product);

  std::optional<double> value() const;
  std::optional<double> last_cosine() const { return last_cos_; }
  std::size_t accepted() const { return accepted_; }
  std::size_t skipped() const { return skipped_; }

 private:
  std::size_t window_;
  std::deque<std::pair<double, double>> terms_;
  double num_ = 0.0;
  double den_ = 0.0;
  std::optional<double> last_cos_;
  std::size_t accepted_ = 0;
  std::size_t skipped_ = 0;
};

struct BoundInputs {
  double lipschitz = 1.0;
  double grad_variance = 0.0;
  double mu = 1.0;
  double rho = 1.0;
  double lambda = 0.0;  // f(x_0) - inf f
  double c = 0.0;       // delayed-gradient constant
  std::size_t horizon = 1;

  // Throws ArgumentError if any field is out of range.
  void validate() const;
};

// (sum_t eta_t^2 L grad_variance / 2 + lambda + c) /
//     sum_t (eta_t rho mu - eta_t^2 L / 2), t = 0..T-1.
// Throws BoundInapplicableError if the denominator is not positive.
double theorem_bound(const BoundInputs& in, const LrSchedule& schedule);
// (grad_variance / 2 + (lambda + c) L / (rho mu)^2) / (sqrt(T) - 1/2).
double corollary_bound(const BoundInputs& in);

// max(0, sum eta_t^2 (|grad f(x_stale)|^2 - |grad f(x_t)|^2)) over records
// carrying both norms, scaled by horizon / sampled count.
double estimate_C(const std::vector<RunRecord>& records, const LrSchedule& schedule,
                  std::size_t horizon);

// Sampled full-gradient norms of one run in order, with the final iterate's
// norm appended when given.
std::vector<double> sampled_grad_norms(const std::vector<RunRecord>& records,
                                       std::optional<double> final_norm_sq);
// Averages position-wise over seeds (equal lengths), then takes the minimum.
double min_grad_norm_sq(const std::vector<std::vector<double>>& per_seed);

// Rank correlation with average ranks for ties. Throws on < 2 points or a
// constant input.
double spearman(const std::vector<double>& a, const std::vector<double>& b);
// Least-squares slope of log10(y) against log10(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);
double stddev(const std::vector<double>& v);  // sample (n - 1) form
// Linear-interpolation quantile, q in [0, 1].
double quantile(std::vector<double> v, double q);

// Shortest round-trip decimal form.
std::string format_double(double v);

struct RunMeta {
  std::string run_id;
  Variant variant = Variant::kAsgd;
  double rho = 1.0;
  std::size_t workers = 1;
  double delay_variance = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kCsvHeader =
    "run_id,variant,rho,workers,delay_variance,seed,t,staleness,eta,train_loss,"
    "mb_grad_norm_sq,full_grad_norm_sq,cos_t,mu_hat";

void write_records_csv(std::ostream& out, const RunMeta& meta,
                       const std::vector<RunRecord>& records, bool header = true);

}  // namespace sasgd
