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
#include "sasgd/experiments.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sasgd/errors.h"
#include "sasgd/metrics.h"

#ifndef SASGD_DEFAULT_DATA_DIR
#define SASGD_DEFAULT_DATA_DIR "data"
#endif

namespace sasgd {

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

std::mutex g_cache_mutex;
std::map<std::string, std::shared_ptr<const Dataset>> g_dataset_cache;

std::shared_ptr<const Dataset> cached(const std::string& key,
                                      const std::function<Dataset()>& make) {
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    const auto it = g_dataset_cache.find(key);
    if (it != g_dataset_cache.end()) return it->second;
  }
  auto ds = std::make_shared<const Dataset>(make());
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  return g_dataset_cache.emplace(key, std::move(ds)).first->second;
}

std::string or_default(const RunConfig& cfg, const std::string& path, const char* file) {
  if (!path.empty()) return cfg.resolve(path);
  return (std::filesystem::path(data_dir()) / "mnist" / file).string();
}

// Blobs: one draw for train and test so both share the class means.
constexpr std::uint64_t kBlobSeed = 0x5eed;
constexpr std::uint64_t kQuadraticSeed = 0;

}  // namespace

std::string data_dir() {
  if (const char* env = std::getenv("SASGD_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return SASGD_DEFAULT_DATA_DIR;
}

Problem build_problem(const RunConfig& cfg) {
  cfg.validate();
  Problem p;
  if (cfg.objective == ObjectiveKind::kQuadratic) {
    p.objective = synthetic_quadratic(cfg.quad_dim, cfg.quad_samples,
                                      linspace(cfg.spectrum_lo, cfg.spectrum_hi, cfg.quad_dim),
                                      kQuadraticSeed, cfg.spread, cfg.epsilon, cfg.x0_value);
    return p;
  }
  std::shared_ptr<const Dataset> train;
  if (cfg.data_source == "mnist") {
    const std::string ti = or_default(cfg, cfg.train_images, "train-10k-images-idx3-ubyte.gz");
    const std::string tl = or_default(cfg, cfg.train_labels, "train-10k-labels-idx1-ubyte.gz");
    const std::string vi = or_default(cfg, cfg.test_images, "t10k-images-idx3-ubyte.gz");
    const std::string vl = or_default(cfg, cfg.test_labels, "t10k-labels-idx1-ubyte.gz");
    const std::size_t max_rows = cfg.max_rows;
    train = cached(ti + "|" + tl + "|" + std::to_string(max_rows),
                   [&] { return load_mnist_idx(ti, tl, max_rows); });
    p.test = cached(vi + "|" + vl, [&] { return load_mnist_idx(vi, vl); });
  } else {
    const std::string key = "blobs|" + std::to_string(cfg.blob_classes) + "|" +
                            std::to_string(cfg.blob_samples) + "|" +
                            std::to_string(cfg.blob_test_samples) + "|" +
                            std::to_string(cfg.blob_features) + "|" +
                            format_double(cfg.blob_separation);
    auto all = cached(key, [&] {
      return synthetic_blobs(cfg.blob_classes, cfg.blob_samples + cfg.blob_test_samples,
                             cfg.blob_features, cfg.blob_separation, kBlobSeed);
    });
    auto split = [&](std::size_t from, std::size_t count) {
      Dataset d;
      d.rows = count;
      d.cols = all->cols;
      d.classes = all->classes;
      d.features.assign(all->features.begin() + static_cast<std::ptrdiff_t>(from * all->cols),
                        all->features.begin() + static_cast<std::ptrdiff_t>((from + count) * all->cols));
      d.labels.assign(all->labels.begin() + static_cast<std::ptrdiff_t>(from),
                      all->labels.begin() + static_cast<std::ptrdiff_t>(from + count));
      return d;
    };
    train = cached(key + "|train", [&] { return split(0, cfg.blob_samples); });
    p.test = cached(key + "|test", [&] { return split(cfg.blob_samples, cfg.blob_test_samples); });
  }
  if (cfg.objective == ObjectiveKind::kMlp) {
    p.objective = std::make_shared<MlpObjective>(train, cfg.hidden);
  } else {
    p.objective = std::make_shared<SoftmaxRegression>(train);
  }
  return p;
}

SimulationSpec make_spec(const RunConfig& cfg, const Problem& problem) {
  SimulationSpec s;
  s.objective = problem.objective;
  s.variant = cfg.variant;
  s.rho = cfg.rho;
  s.workers = cfg.workers;
  s.delay = cfg.delay;
  s.delay.script_path = cfg.resolve(cfg.delay.script_path);
  s.batch_size = cfg.batch_size;
  s.updates = cfg.budget(problem.objective->num_samples());
  s.momentum = cfg.momentum;
  s.seed = cfg.seed;
  s.sample_period = cfg.sample_period;
  s.track_stale_norms = cfg.stale_norms;
  s.mu_window = cfg.mu_window;
  if (cfg.lr_schedule == "constant") {
    s.lr = LrSchedule::constant(cfg.lr);
  } else {
    double L = cfg.lr_lipschitz;
    if (L == 0.0) {
      const auto exact = problem.objective->exact_lipschitz();
      if (!exact) throw ConfigError("lr.lipschitz", "required: objective has no closed-form L");
      L = *exact;
    }
    s.lr = cfg.lr_schedule == "inverse_sqrt"
               ? LrSchedule::inverse_sqrt(cfg.rho, cfg.lr_mu, L)
               : LrSchedule::horizon_constant(cfg.rho, cfg.lr_mu, L, s.updates);
  }
  return s;
}

RunOutcome run_config(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Problem problem = build_problem(cfg);
  RunOutcome out;
  out.config = cfg;
  out.result = run_simulation(make_spec(cfg, problem));
  out.avg_staleness = avg_staleness(out.result.staleness);
  out.final_loss = problem.objective->full_loss(out.result.final_x);
  if (problem.test) {
    const auto& cls = static_cast<const ClassificationObjective&>(*problem.objective);
    out.accuracy = accuracy(cls, out.result.final_x, *problem.test);
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string records_csv(const RunOutcome& outcome, bool header) {
  std::ostringstream ss;
  RunMeta meta;
  meta.run_id = outcome.config.run_id;
  meta.variant = outcome.config.variant;
  meta.rho = outcome.config.rho;
  meta.workers = outcome.config.workers;
  meta.delay_variance = outcome.config.delay.delay_variance;
  meta.seed = outcome.config.seed;
  write_records_csv(ss, meta, outcome.result.records, header);
  return ss.str();
}

std::string summary_json(const RunOutcome& o) {
  nlohmann::ordered_json j;
  j["run_id"] = o.config.run_id;
  j["variant"] = to_string(o.config.variant);
  j["rho"] = o.config.rho;
  j["workers"] = o.config.workers;
  j["delay_variance"] = o.config.delay.delay_variance;
  j["seed"] = o.config.seed;
  j["updates"] = o.result.records.size();
  j["final_accuracy"] = o.accuracy ? nlohmann::ordered_json(*o.accuracy) : nlohmann::ordered_json();
  j["final_train_loss"] = o.final_loss;
  j["avg_staleness"] = o.avg_staleness;
  j["max_staleness"] = o.result.max_staleness;
  j["mu_hat_final"] =
      o.result.final_mu_hat ? nlohmann::ordered_json(*o.result.final_mu_hat) : nlohmann::ordered_json();
  j["sim_time"] = o.result.sim_time;
  j["runtime_seconds"] = o.wall_seconds;
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

// ---------------------------------------------------------------------------
// Grid

std::optional<double> CellReport::mean_accuracy() const {
  std::vector<double> v;
  for (const auto& a : accuracy) {
    if (a) v.push_back(*a);
  }
  if (v.empty()) return std::nullopt;
  return mean(v);
}

std::optional<double> CellReport::std_accuracy() const {
  std::vector<double> v;
  for (const auto& a : accuracy) {
    if (a) v.push_back(*a);
  }
  if (v.empty()) return std::nullopt;
  return stddev(v);
}

std::optional<double> CellReport::mean_mu_hat() const {
  std::vector<double> v;
  for (const auto& m : mu_hat) {
    if (m) v.push_back(*m);
  }
  if (v.empty()) return std::nullopt;
  return mean(v);
}

GridReport run_grid(const GridSpec& grid, std::size_t jobs, const std::string& out_dir) {
  const std::size_t cells = grid.cell_count();
  const std::size_t tasks = cells * grid.repeats;
  struct TaskOut {
    RunConfig config;
    std::optional<double> accuracy;
    double avg_staleness = 0.0;
    std::optional<double> mu_hat;
    double final_loss = 0.0;
    std::string csv;
  };
  std::vector<TaskOut> outs(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= tasks) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (error) return;
      }
      try {
        const std::size_t cell = task / grid.repeats;
        const std::size_t rep = task % grid.repeats;
        RunConfig cfg = grid.cell_config(cell, rep);
        cfg.run_id += "-c" + std::to_string(cell) + "-r" + std::to_string(rep);
        RunOutcome o = run_config(cfg);
        TaskOut& t = outs[task];
        t.config = cfg;
        t.accuracy = o.accuracy;
        t.avg_staleness = o.avg_staleness;
        t.mu_hat = o.result.final_mu_hat;
        t.final_loss = o.final_loss;
        t.csv = records_csv(o, rep == 0);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs, tasks));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  GridReport report;
  for (std::size_t c = 0; c < cells; ++c) {
    CellReport cr;
    cr.cell = c;
    cr.values = grid.cell_values(c);
    const RunConfig& first = outs[c * grid.repeats].config;
    cr.variant = first.variant;
    cr.lr = first.lr;
    cr.rho = first.rho;
    cr.workers = first.workers;
    for (std::size_t r = 0; r < grid.repeats; ++r) {
      TaskOut& t = outs[c * grid.repeats + r];
      cr.accuracy.push_back(t.accuracy);
      cr.avg_staleness.push_back(t.avg_staleness);
      cr.mu_hat.push_back(t.mu_hat);
      cr.final_loss.push_back(t.final_loss);
      cr.csv += t.csv;
    }
    if (!out_dir.empty()) {
      write_file_atomic((std::filesystem::path(out_dir) / ("cell-" + std::to_string(c) + ".csv")).string(),
                        cr.csv);
    }
    report.cells.push_back(std::move(cr));
  }
  std::map<Variant, std::size_t> best;
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const auto& c = report.cells[i];
    const auto acc = c.mean_accuracy();
    if (!acc) continue;
    const auto it = best.find(c.variant);
    if (it == best.end()) {
      best[c.variant] = i;
      continue;
    }
    const auto& b = report.cells[it->second];
    const double bacc = *b.mean_accuracy();
    if (*acc > bacc || (*acc == bacc && c.lr < b.lr)) it->second = i;
  }
  for (const auto& [v, i] : best) report.best.emplace_back(v, i);
  if (!out_dir.empty()) {
    write_file_atomic((std::filesystem::path(out_dir) / "summary.csv").string(),
                      grid_summary_csv(report));
    write_file_atomic((std::filesystem::path(out_dir) / "summary.json").string(),
                      grid_summary_json(report));
  }
  return report;
}

std::string grid_summary_csv(const GridReport& report) {
  std::ostringstream ss;
  ss << "cell";
  if (!report.cells.empty()) {
    for (const auto& [k, v] : report.cells.front().values) ss << ",grid." << k;
  }
  ss << ",variant,rho,workers,lr,repeats,acc_mean,acc_std,avg_staleness,mu_hat_mean,"
        "final_loss_mean,best\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const auto& c = report.cells[i];
    bool is_best = false;
    for (const auto& [v, b] : report.best) is_best = is_best || b == i;
    ss << c.cell;
    for (const auto& [k, v] : c.values) {
      std::string s = format_value(v);
      if (s.size() >= 2 && s.front() == '"') s = s.substr(1, s.size() - 2);
      ss << ',' << s;
    }
    ss << ',' << to_string(c.variant) << ',' << format_double(c.rho) << ',' << c.workers << ','
       << format_double(c.lr) << ',' << c.accuracy.size() << ',' << opt(c.mean_accuracy()) << ','
       << opt(c.std_accuracy()) << ',' << format_double(mean(c.avg_staleness)) << ','
       << opt(c.mean_mu_hat()) << ',' << format_double(mean(c.final_loss)) << ','
       << (is_best ? 1 : 0) << '\n';
  }
  return ss.str();
}

std::string grid_summary_json(const GridReport& report) {
  using J = nlohmann::ordered_json;
  J cells = J::array();
  auto opt = [](const std::optional<double>& v) { return v ? J(*v) : J(); };
  for (const auto& c : report.cells) {
    J j;
    j["cell"] = c.cell;
    J axes = J::object();
    for (const auto& [k, v] : c.values) axes[k] = format_value(v);
    j["axes"] = axes;
    j["variant"] = to_string(c.variant);
    j["rho"] = c.rho;
    j["workers"] = c.workers;
    j["lr"] = c.lr;
    J accs = J::array();
    for (const auto& a : c.accuracy) accs.push_back(opt(a));
    j["accuracy"] = accs;
    j["acc_mean"] = opt(c.mean_accuracy());
    j["acc_std"] = opt(c.std_accuracy());
    j["avg_staleness"] = c.avg_staleness;
    J mus = J::array();
    for (const auto& m : c.mu_hat) mus.push_back(opt(m));
    j["mu_hat"] = mus;
    j["final_loss"] = c.final_loss;
    cells.push_back(j);
  }
  J best = J::object();
  for (const auto& [v, i] : report.best) best[to_string(v)] = report.cells[i].cell;
  J root;
  root["cells"] = cells;
  root["best"] = best;
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Staleness study

StalenessStudy staleness_study(std::size_t workers, const DelayConfig& delay, std::size_t updates,
                               const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ArgumentError("staleness_study: no seeds");
  // One-coordinate objective: the event loop is all that matters here.
  auto obj = synthetic_quadratic(1, 1, {1.0}, 0, 0.0);
  StalenessStudy out;
  for (const auto seed : seeds) {
    SimulationSpec s;
    s.objective = obj;
    s.variant = Variant::kAsgd;
    s.workers = workers;
    s.delay = delay;
    s.batch_size = 1;
    s.updates = updates;
    s.lr = LrSchedule::constant(0.1);
    s.seed = seed;
    const RunResult r = run_simulation(s);
    out.per_seed_avg.push_back(avg_staleness(r.staleness));
    out.per_seed_max.push_back(r.max_staleness);
    for (const auto& [tau, count] : staleness_histogram(r.staleness)) out.histogram[tau] += count;
  }
  out.mean_avg = mean(out.per_seed_avg);
  return out;
}

// ---------------------------------------------------------------------------
// Bound verification

std::shared_ptr<QuadraticObjective> bound_objective() {
  constexpr std::size_t kDim = 50;
  // Curvatures in [1, 2] under a sine term of weight 1.25: the loss is
  // non-convex along every coordinate with curvature below 1.25.
  return synthetic_quadratic(kDim, 1000, linspace(1.0, 2.0, kDim), 0, 1.0, 1.25, 2.0);
}

std::vector<BoundGroup> bound_study(const BoundStudyOptions& opts) {
  const auto obj = bound_objective();
  const double L = *obj->exact_lipschitz();
  RngStream probe(0, streams::kProbe);
  const DenseVector x0 = obj->initial_point(probe);
  const double grad_variance =
      estimate_gradient_variance(*obj, x0, opts.batch_size, opts.variance_draws, probe);
  const double lambda = obj->full_loss(x0) - obj->infimum();

  auto base_spec = [&](std::size_t workers, double rho, std::uint64_t seed) {
    SimulationSpec s;
    s.objective = obj;
    s.variant = Variant::kPhiSgd;
    s.rho = rho;
    s.workers = workers;
    s.delay.delay_variance = opts.delay_variance;
    s.batch_size = opts.batch_size;
    s.sample_period = opts.sample_period;
    s.seed = seed;
    return s;
  };

  std::vector<BoundGroup> groups;
  for (const std::size_t workers : opts.workers) {
    for (const double rho : opts.rhos) {
      BoundGroup g;
      g.workers = workers;
      g.rho = rho;
      // Pilot with mu = 1; take the 10th percentile of the running estimate
      // as a conservative lower bound.
      SimulationSpec pilot = base_spec(workers, rho, opts.pilot_seed);
      pilot.updates = opts.pilot_horizon;
      pilot.lr = LrSchedule::horizon_constant(rho, 1.0, L, opts.pilot_horizon);
      const RunResult pr = run_simulation(pilot);
      std::vector<double> mus;
      for (const auto& r : pr.records) {
        if (r.mu_hat) mus.push_back(*r.mu_hat);
      }
      const double mu = std::clamp(quantile(mus, 0.1), 1e-6, 1.0);

      std::vector<double> horizons, mins;
      for (const std::size_t T : opts.horizons) {
        BoundRow row;
        row.workers = workers;
        row.rho = rho;
        row.horizon = T;
        row.mu = mu;
        row.lipschitz = L;
        row.grad_variance = grad_variance;
        row.lambda = lambda;
        const LrSchedule lr = LrSchedule::horizon_constant(rho, mu, L, T);
        std::vector<std::vector<double>> series;
        std::vector<double> cs;
        for (std::size_t s = 0; s < opts.seeds; ++s) {
          SimulationSpec spec = base_spec(workers, rho, s);
          spec.updates = T;
          spec.lr = lr;
          spec.track_stale_norms = true;
          const RunResult r = run_simulation(spec);
          series.push_back(sampled_grad_norms(r.records, r.final_full_grad_norm_sq));
          cs.push_back(estimate_C(r.records, lr, T));
        }
        row.c = mean(cs);
        row.min_grad_norm_sq = min_grad_norm_sq(series);
        BoundInputs in{L, grad_variance, mu, rho, lambda, row.c, T};
        try {
          row.theorem = theorem_bound(in, lr);
        } catch (const BoundInapplicableError&) {
          row.applicable = false;
        }
        row.corollary = corollary_bound(in);
        horizons.push_back(static_cast<double>(T));
        mins.push_back(row.min_grad_norm_sq);
        g.rows.push_back(row);
      }
      g.slope = loglog_slope(horizons, mins);
      groups.push_back(std::move(g));
    }
  }
  return groups;
}

}  // namespace sasgd
