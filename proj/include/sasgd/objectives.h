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
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sasgd/numkit.h"

namespace sasgd {

enum class ObjectiveKind { kQuadratic, kLogisticRegression, kMlp };

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_kind_from_string(const std::string& name);

/// Labelled feature matrix, row-major n x p.
struct Dataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  int classes = 0;
  std::vector<double> features;
  std::vector<std::uint8_t> labels;

  // Throws ArgumentError on shape mismatch, bad label or non-finite feature.
  void validate() const;
  const double* row(std::size_t i) const { return features.data() + i * cols; }
};

/// Finite-sum objective f(x) = (1/n) sum_i f(x, i).
///
/// Implementations are immutable after construction and safe to share
/// between concurrently running simulations.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual ObjectiveKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t num_samples() const = 0;

  // Mean loss over `batch` (indices may repeat). When `grad` is non-null it
  // receives the mean gradient. Every public gradient entry point goes through
  // here, so the full gradient and a full-batch minibatch gradient agree
  // bit for bit.
  virtual double evaluate(const DenseVector& x,
                          std::span<const std::size_t> batch,
                          DenseVector* grad) const = 0;

  virtual DenseVector initial_point(RngStream& rng) const = 0;

  // Known smoothness constant, if the objective has one in closed form.
  virtual std::optional<double> exact_lipschitz() const { return std::nullopt; }

  DenseVector minibatch_gradient(const DenseVector& x,
                                 std::span<const std::size_t> batch) const;
  DenseVector full_gradient(const DenseVector& x) const;
  double loss(const DenseVector& x, std::span<const std::size_t> batch) const;
  double full_loss(const DenseVector& x) const;
  // Loss and gradient in one pass over the full training set.
  double full_loss_and_gradient(const DenseVector& x, DenseVector& grad) const;

 protected:
  void check_args(const DenseVector& x, std::span<const std::size_t> batch) const;
};

/// f(x, i) = 1/2 sum_j a_j (x_j - c_ij)^2 + eps sum_j (1 + sin x_j) - offset.
///
/// `offset` is the mean spread term 1/2 sum_j a_j Var_i(c_ij), so with
/// eps = 0 the full loss is exactly 0 at the minimizer mean(c). The sine term
/// makes the landscape non-convex wherever a_j < eps.
class QuadraticObjective : public Objective {
 public:
  QuadraticObjective(std::vector<double> spectrum, std::size_t num_samples,
                     std::vector<double> centers, double epsilon,
                     double initial_value = 0.0);

  ObjectiveKind kind() const override { return ObjectiveKind::kQuadratic; }
  std::size_t dim() const override { return spectrum_.size(); }
  std::size_t num_samples() const override { return n_; }
  double evaluate(const DenseVector& x, std::span<const std::size_t> batch,
                  DenseVector* grad) const override;
  // Constant vector filled with `initial_value`; rng unused.
  DenseVector initial_point(RngStream& rng) const override;
  // max_j a_j + eps: the sine term's Hessian is bounded by eps.
  std::optional<double> exact_lipschitz() const override;

  const std::vector<double>& spectrum() const { return spectrum_; }
  double epsilon() const { return epsilon_; }
  const DenseVector& center_mean() const { return mean_; }
  // Exact infimum of the full loss (per-coordinate 1-D minimization).
  double infimum() const;
  // Global minimizer; only available in closed form when eps = 0.
  DenseVector minimizer() const;

 private:
  std::vector<double> spectrum_;
  std::size_t n_;
  std::vector<double> centers_;  // n x d, row-major
  double epsilon_;
  double initial_value_;
  DenseVector mean_;
  double offset_ = 0.0;
};

/// Softmax cross-entropy model over a Dataset. Base for the linear
/// (multinomial logistic) model and the one-hidden-layer MLP.
class ClassificationObjective : public Objective {
 public:
  explicit ClassificationObjective(std::shared_ptr<const Dataset> data);

  std::size_t num_samples() const override { return data_->rows; }
  const Dataset& data() const { return *data_; }

  // Predicted class per row of `test`.
  virtual std::vector<int> predict(const DenseVector& x, const Dataset& test) const = 0;

 protected:
  std::shared_ptr<const Dataset> data_;
};

/// Multinomial logistic regression; with two classes this is ordinary
/// logistic regression. Layout: W (classes x p, row-major) then b (classes).
class SoftmaxRegression : public ClassificationObjective {
 public:
  explicit SoftmaxRegression(std::shared_ptr<const Dataset> data);

  ObjectiveKind kind() const override { return ObjectiveKind::kLogisticRegression; }
  std::size_t dim() const override;
  double evaluate(const DenseVector& x, std::span<const std::size_t> batch,
                  DenseVector* grad) const override;
  // All zeros.
  DenseVector initial_point(RngStream& rng) const override;
  std::vector<int> predict(const DenseVector& x, const Dataset& test) const override;
};

/// p -> hidden (tanh) -> classes (softmax) network.
/// Layout: W1 (hidden x p), b1 (hidden), W2 (classes x hidden), b2 (classes).
class MlpObjective : public ClassificationObjective {
 public:
  MlpObjective(std::shared_ptr<const Dataset> data, std::size_t hidden);

  ObjectiveKind kind() const override { return ObjectiveKind::kMlp; }
  std::size_t dim() const override;
  std::size_t hidden() const { return hidden_; }
  double evaluate(const DenseVector& x, std::span<const std::size_t> batch,
                  DenseVector* grad) const override;
  // Glorot-uniform weights, zero biases.
  DenseVector initial_point(RngStream& rng) const override;
  std::vector<int> predict(const DenseVector& x, const Dataset& test) const override;

 private:
  std::size_t hidden_;
};

// Uniform with replacement; batch_size >= n returns every index once.
std::vector<std::size_t> sample_minibatch(std::size_t n, std::size_t batch_size,
                                          RngStream& rng);

// Exact constant when the objective has one, otherwise probe_lipschitz.
double estimate_lipschitz(const Objective& obj, std::size_t probes, RngStream& rng);
// max over random pairs (x, y) of |grad f(x) - grad f(y)| / |x - y|, with x
// drawn around the initial point. A lower bound on the true constant.
double probe_lipschitz(const Objective& obj, std::size_t probes, RngStream& rng,
                       double radius = 1.0);

// Monte-Carlo estimate of E |g(x, xi) - grad f(x)|^2 over `draws` batches.
double estimate_gradient_variance(const Objective& obj, const DenseVector& x,
                                  std::size_t batch_size, std::size_t draws,
                                  RngStream& rng);

// Fraction of rows of `test` classified correctly. Throws on an empty set.
double accuracy(const ClassificationObjective& obj, const DenseVector& x,
                const Dataset& test);

class IdxFormatError : public std::runtime_error {
 public:
  enum class Kind { kIo, kBadMagic, kTruncated, kCountMismatch, kBadLabel };
  IdxFormatError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Reads an MNIST-style IDX image/label pair, raw or gzip-compressed. Pixels
// are scaled to [0, 1]. `max_rows` > 0 keeps only the leading rows.
Dataset load_mnist_idx(const std::string& images_path,
                       const std::string& labels_path, std::size_t max_rows = 0);

// Centers c_i ~ N(0, spread^2 I) from the init stream of `seed`.
std::shared_ptr<QuadraticObjective> synthetic_quadratic(
    std::size_t dim, std::size_t n, std::vector<double> spectrum,
    std::uint64_t seed, double spread = 1.0, double epsilon = 0.0,
    double initial_value = 0.0);

// Balanced labels (i mod classes); class means separation * N(0, I), points
// mean + N(0, I).
Dataset synthetic_blobs(int classes, std::size_t n, std::size_t p,
                        double separation, std::uint64_t seed);

}  // namespace sasgd
