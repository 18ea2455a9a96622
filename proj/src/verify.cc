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
#include <numeric>
#include <sstream>

#include "sasgd/errors.h"
#include "sasgd/experiments.h"
#include "sasgd/metrics.h"
#include "sasgd/sparsifier.h"

namespace sasgd {

namespace {

DenseVector gaussian_vector(std::size_t d, RngStream& rng) {
  DenseVector u(d);
  for (auto& v : u) v = sample_standard_normal(rng);
  return u;
}

// Reference selection: stable sort of all indices by descending magnitude.
DenseVector full_sort_top_k(const DenseVector& u, std::size_t k) {
  std::vector<std::size_t> idx(u.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return std::fabs(u[a]) > std::fabs(u[b]); });
  DenseVector out(u.size());
  for (std::size_t i = 0; i < k; ++i) out[idx[i]] = u[idx[i]];
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> dk_grid() {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t d : {1, 2, 7, 64, 256}) {
    std::vector<std::size_t> ks = {1, (d + 3) / 4, (d + 1) / 2, d};
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (std::size_t k : ks) out.emplace_back(d, k);
  }
  return out;
}

SuiteResult contraction_suite(std::uint64_t seed, bool lower_bound) {
  RngStream rng(seed, streams::kProbe);
  std::size_t checked = 0;
  for (const auto& [d, k] : dk_grid()) {
    for (int i = 0; i < 10000; ++i) {
      const DenseVector u = gaussian_vector(d, rng);
      const bool ok = lower_bound ? check_lower_bound(u, k) : check_k_contraction(u, k);
      if (!ok || top_k(u, k).densify() != full_sort_top_k(u, k)) {
        std::ostringstream ss;
        ss << "failed at d=" << d << " k=" << k << " vector " << i;
        return {"", false, ss.str()};
      }
      ++checked;
    }
  }
  return {"", true, std::to_string(checked) + " vectors"};
}

SuiteResult memory_suite(std::uint64_t seed) {
  RngStream rng(seed, streams::kProbe);
  const std::size_t d = 64;
  MemoryState mem(d);
  for (int step = 0; step < 1000; ++step) {
    const DenseVector g = gaussian_vector(d, rng);
    const std::size_t k = 1 + rng.below(d);
    DenseVector expected = mem.vector();
    for (std::size_t i = 0; i < d; ++i) expected[i] += g[i];
    auto [update, next] = memory_combine(mem, g, k);
    DenseVector got = update.densify();
    for (std::size_t i = 0; i < d; ++i) got[i] += next.vector()[i];
    if (got != expected) {
      return {"", false, "conservation broken at step " + std::to_string(step)};
    }
    mem = next;
  }
  // k = d: memory stays zero and the run matches ASGD bit for bit.
  auto obj = synthetic_quadratic(8, 64, std::vector<double>(8, 1.0), seed, 1.0);
  SimulationSpec spec;
  spec.objective = obj;
  spec.workers = 4;
  spec.updates = 200;
  spec.batch_size = 4;
  spec.momentum = 0.5;
  spec.lr = LrSchedule::constant(0.1);
  spec.seed = seed;
  spec.keep_iterates = true;
  const RunResult asgd = run_simulation(spec);
  spec.variant = Variant::kPhiMemSgd;
  spec.rho = 1.0;
  const RunResult mem_run = run_simulation(spec);
  if (asgd.iterates != mem_run.iterates) {
    return {"", false, "PhiMemSGD with k=d diverged from ASGD"};
  }
  return {"", true, "1000 steps conserved; k=d matches ASGD"};
}

double fd_max_rel_error(const Objective& obj, const DenseVector& x, std::size_t coords,
                        RngStream& rng) {
  const DenseVector g = obj.full_gradient(x);
  double worst = 0.0;
  const double h = 1e-5;
  for (std::size_t c = 0; c < coords; ++c) {
    const std::size_t j = rng.below(obj.dim());
    DenseVector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const double fd = (obj.full_loss(xp) - obj.full_loss(xm)) / (2.0 * h);
    const double scale = std::max(std::fabs(fd), std::fabs(g[j]));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::fabs(fd - g[j]) / scale);
  }
  return worst;
}

SuiteResult gradient_suite(std::uint64_t seed) {
  RngStream rng(seed, streams::kProbe);
  std::vector<std::pair<std::string, std::shared_ptr<const Objective>>> objs;
  objs.emplace_back("quadratic", bound_objective());
  auto blobs = std::make_shared<const Dataset>(synthetic_blobs(3, 60, 5, 2.0, seed));
  objs.emplace_back("logistic_regression", std::make_shared<SoftmaxRegression>(blobs));
  objs.emplace_back("mlp", std::make_shared<MlpObjective>(blobs, 7));
  std::ostringstream ss;
  bool ok = true;
  for (const auto& [name, obj] : objs) {
    double worst = 0.0;
    for (int p = 0; p < 5; ++p) {
      DenseVector x = obj->initial_point(rng);
      for (auto& v : x) v += 0.5 * sample_standard_normal(rng);
      worst = std::max(worst, fd_max_rel_error(*obj, x, 20, rng));
    }
    ss << name << " max rel err " << format_double(worst) << "; ";
    ok = ok && worst <= 1e-5;
  }
  return {"", ok, ss.str()};
}

SuiteResult appendix_b_suite() {
  auto obj = synthetic_quadratic(2, 4, {1.0, 1.0}, 0, 1.0);
  SimulationSpec spec;
  spec.objective = obj;
  spec.workers = 3;
  spec.updates = 5;
  spec.batch_size = 1;
  spec.lr = LrSchedule::constant(0.1);
  // Arrival order W1, W2, W3, W1, W2 (ids 0-based here).
  spec.delay_source = std::make_shared<ScriptedDelaySource>(
      3, std::vector<std::pair<std::size_t, double>>{
             {0, 1.0}, {1, 2.0}, {2, 3.0}, {0, 2.5}, {1, 2.0}, {2, 10.0}, {0, 10.0}});
  const RunResult r = run_simulation(spec);
  std::vector<std::size_t> taus;
  for (const auto& s : r.staleness) taus.push_back(s.staleness);
  const std::vector<std::size_t> want = {0, 1, 2, 2, 2};
  std::ostringstream ss;
  for (auto t : taus) ss << t << ' ';
  return {"", taus == want, "staleness " + ss.str()};
}

SuiteResult staleness_suite() {
  DelayConfig dc;
  dc.compute_lo = 0.0;
  dc.compute_hi = 0.0;
  std::vector<std::uint64_t> seeds(20);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
  dc.delay_variance = 0.1;
  const double low = staleness_study(8, dc, 312, seeds).mean_avg;
  dc.delay_variance = 3.0;
  const double high = staleness_study(8, dc, 312, seeds).mean_avg;
  bool ok = low >= 6.5 && low <= 7.5 && high < low - 1.0;
  for (std::size_t n : {2, 3, 4}) {
    DelayConfig c;
    c.kind = DelayModelKind::kConstant;
    const auto s = staleness_study(n, c, 100, {0});
    // After the first round every update is n - 1 stale.
    ok = ok && s.histogram.size() <= n && s.histogram.rbegin()->first == n - 1 &&
         s.histogram.rbegin()->second == 100 - (n - 1);
  }
  return {"", ok,
          "mean staleness " + format_double(low) + " (delay variance 0.1) vs " +
              format_double(high) + " (3)"};
}

SuiteResult bounds_suite() {
  const auto groups = bound_study(BoundStudyOptions{});
  bool ok = true;
  std::ostringstream ss;
  for (const auto& g : groups) {
    for (const auto& r : g.rows) ok = ok && r.applicable && r.min_grad_norm_sq <= r.theorem;
    ok = ok && std::fabs(g.slope + 0.5) <= 0.15;
    ss << "workers=" << g.workers << " rho=" << g.rho << " slope=" << format_double(g.slope)
       << "; ";
  }
  return {"", ok, ss.str()};
}

SuiteResult mu_suite() {
  auto obj = synthetic_quadratic(10, 50, std::vector<double>(10, 1.0), 0, 1.0, 0.0, 3.0);
  SimulationSpec spec;
  spec.objective = obj;
  spec.workers = 1;
  spec.updates = 100;
  spec.batch_size = 50;
  spec.lr = LrSchedule::constant(0.1);
  spec.sample_period = 1;
  const RunResult r = run_simulation(spec);
  const bool ok = r.final_mu_hat && *r.final_mu_hat == 1.0;
  return {"", ok, "mu_hat = " + (r.final_mu_hat ? format_double(*r.final_mu_hat) : "n/a")};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "contraction", "lemma", "memory", "gradients", "appendix-b", "staleness", "mu", "bounds"};
  return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  SuiteResult r;
  if (name == "contraction") {
    r = contraction_suite(seed, false);
  } else if (name == "lemma") {
    r = contraction_suite(seed, true);
  } else if (name == "memory") {
    r = memory_suite(seed);
  } else if (name == "gradients") {
    r = gradient_suite(seed);
  } else if (name == "appendix-b") {
    r = appendix_b_suite();
  } else if (name == "staleness") {
    r = staleness_suite();
  } else if (name == "mu") {
    r = mu_suite();
  } else if (name == "bounds") {
    r = bounds_suite();
  } else {
    throw ArgumentError("unknown suite '" + name + "'");
  }
  r.name = name;
  return r;
}

}  // namespace sasgd
