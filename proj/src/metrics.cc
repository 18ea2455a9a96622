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
#include "sasgd/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "sasgd/errors.h"

namespace sasgd {

bool MuEstimate::update(const Transmission& u, const DenseVector& full_grad) {
  const double nu = transmission_norm_sq(u);
  const double ng = norm_sq(full_grad);
  if (nu == 0.0 || ng == 0.0) {
    ++skipped_;
    return false;
  }
  return update(transmission_dot(u, full_grad), std::sqrt(nu * ng));
}

bool MuEstimate::update(double inner, double norm_product) {
  if (!(norm_product > 0.0)) {
    ++skipped_;
    return false;
  }
  last_cos_ = std::clamp(inner / norm_product, -1.0, 1.0);
  ++accepted_;
  if (window_ == 0) {
    num_ += inner;
    den_ += norm_product;
    return true;
  }
  terms_.emplace_back(inner, norm_product);
  if (terms_.size() > window_) terms_.pop_front();
  // Re-sum the window rather than subtracting, so the result never drifts.
  num_ = 0.0;
  den_ = 0.0;
  for (const auto& [a, b] : terms_) {
    num_ += a;
    den_ += b;
  }
  return true;
}

std::optional<double> MuEstimate::value() const {
  if (den_ <= 0.0) return std::nullopt;
  return std::clamp(num_ / den_, -1.0, 1.0);
}

void BoundInputs::validate() const {
  if (!(lipschitz > 0.0)) throw ArgumentError("bound: L must be > 0");
  if (!(grad_variance >= 0.0)) throw ArgumentError("bound: grad_variance must be >= 0");
  if (!(mu > 0.0 && mu <= 1.0)) throw ArgumentError("bound: mu must be in (0, 1]");
  if (!(rho > 0.0 && rho <= 1.0)) throw ArgumentError("bound: rho must be in (0, 1]");
  if (!(lambda >= 0.0)) throw ArgumentError("bound: lambda must be >= 0");
  if (!(c >= 0.0)) throw ArgumentError("bound: C must be >= 0");
  if (horizon < 1) throw ArgumentError("bound: T must be >= 1");
}

double theorem_bound(const BoundInputs& in, const LrSchedule& schedule) {
  in.validate();
  double noise = 0.0;
  double progress = 0.0;
  for (std::size_t t = 0; t < in.horizon; ++t) {
    const double eta = lr_at(schedule, t);
    noise += eta * eta * in.lipschitz * in.grad_variance / 2.0;
    progress += eta * in.rho * in.mu - eta * eta * in.lipschitz / 2.0;
  }
  if (!(progress > 0.0)) {
    throw BoundInapplicableError("theorem bound: denominator " + format_double(progress) +
                                 " is not positive for this schedule");
  }
  return (noise + in.lambda + in.c) / progress;
}

double corollary_bound(const BoundInputs& in) {
  in.validate();
  const double rm = in.rho * in.mu;
  const double root = std::sqrt(static_cast<double>(in.horizon));
  return (in.grad_variance / 2.0 + (in.lambda + in.c) * in.lipschitz / (rm * rm)) /
         (root - 0.5);
}

double estimate_C(const std::vector<RunRecord>& records, const LrSchedule& schedule,
                  std::size_t horizon) {
  double stale = 0.0;
  double fresh = 0.0;
  std::size_t sampled = 0;
  for (const auto& r : records) {
    if (!r.full_grad_norm_sq || !r.stale_full_grad_norm_sq) continue;
    const double eta = lr_at(schedule, r.t);
    stale += eta * eta * *r.stale_full_grad_norm_sq;
    fresh += eta * eta * *r.full_grad_norm_sq;
    ++sampled;
  }
  if (sampled == 0) return 0.0;
  const double diff = std::max(0.0, stale - fresh);
  return diff * static_cast<double>(horizon) / static_cast<double>(sampled);
}

std::vector<double> sampled_grad_norms(const std::vector<RunRecord>& records,
                                       std::optional<double> final_norm_sq) {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.full_grad_norm_sq) out.push_back(*r.full_grad_norm_sq);
  }
  if (final_norm_sq) out.push_back(*final_norm_sq);
  return out;
}

double min_grad_norm_sq(const std::vector<std::vector<double>>& per_seed) {
  if (per_seed.empty() || per_seed.front().empty()) {
    throw ArgumentError("min_grad_norm_sq: no samples");
  }
  const std::size_t len = per_seed.front().size();
  for (const auto& s : per_seed) {
    if (s.size() != len) throw ArgumentError("min_grad_norm_sq: series lengths differ");
  }
  double best = INFINITY;
  for (std::size_t i = 0; i < len; ++i) {
    double avg = 0.0;
    for (const auto& s : per_seed) avg += s[i];
    best = std::min(best, avg / static_cast<double>(per_seed.size()));
  }
  return best;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t q = i; q <= j; ++q) ranks[order[q]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw UndefinedValueError("correlation of a constant series");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ArgumentError("spearman: length mismatch");
  if (a.size() < 2) throw ArgumentError("spearman: need at least 2 points");
  return pearson(average_ranks(a), average_ranks(b));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("loglog_slope: need >= 2 pairs");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw ArgumentError("loglog_slope: values must be > 0");
    lx.push_back(std::log10(x[i]));
    ly.push_back(std::log10(y[i]));
  }
  const double mx = mean(lx);
  const double my = mean(ly);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw UndefinedValueError("loglog_slope: x values are all equal");
  return sxy / sxx;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw ArgumentError("mean: empty");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ArgumentError("quantile: empty");
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("quantile: q must be in [0, 1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_records_csv(std::ostream& out, const RunMeta& meta,
                       const std::vector<RunRecord>& records, bool header) {
  if (header) out << kCsvHeader << '\n';
  const std::string prefix = meta.run_id + ',' + to_string(meta.variant) + ',' +
                             format_double(meta.rho) + ',' + std::to_string(meta.workers) +
                             ',' + format_double(meta.delay_variance) + ',' +
                             std::to_string(meta.seed) + ',';
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : records) {
    out << prefix << r.t << ',' << r.staleness << ',' << format_double(r.eta) << ','
        << format_double(r.train_loss) << ',' << format_double(r.mb_grad_norm_sq) << ','
        << opt(r.full_grad_norm_sq) << ',' << opt(r.cos_t) << ',' << opt(r.mu_hat) << '\n';
  }
}

}  // namespace sasgd
