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
#include "sasgd/objectives.h"

#include <zlib.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sasgd/errors.h"

namespace sasgd {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatMap = Eigen::Map<const RowMat>;
using MatMap = Eigen::Map<RowMat>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

// Rows per chunk for large batches. Fixed, so results do not depend on how a
// caller slices its work.
constexpr std::size_t kChunkRows = 512;

RowMat gather_rows(const Dataset& data, std::span<const std::size_t> idx) {
  RowMat out(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(data.cols));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    std::copy_n(data.row(idx[r]), data.cols, out.row(static_cast<Eigen::Index>(r)).data());
  }
  return out;
}

// In place: logits -> probabilities, returns summed cross-entropy.
double softmax_xent(RowMat& z, const Dataset& data, std::span<const std::size_t> idx) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    const double mx = row.maxCoeff();
    row.array() -= mx;
    const int y = data.labels[idx[static_cast<std::size_t>(r)]];
    const double zy = row(y);
    row = row.array().exp().matrix();
    const double s = row.sum();
    // -log softmax_y = log s - (z_y - mx)
    total += std::log(s) - zy;
    row /= s;
  }
  return total;
}

// probs -> dL/dlogits (unnormalized by batch size).
void subtract_onehot(RowMat& p, const Dataset& data, std::span<const std::size_t> idx) {
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    p(r, data.labels[idx[static_cast<std::size_t>(r)]]) -= 1.0;
  }
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kQuadratic: return "quadratic";
    case ObjectiveKind::kLogisticRegression: return "logistic_regression";
    case ObjectiveKind::kMlp: return "mlp";
  }
  return "?";
}

ObjectiveKind objective_kind_from_string(const std::string& name) {
  if (name == "quadratic") return ObjectiveKind::kQuadratic;
  if (name == "logistic_regression") return ObjectiveKind::kLogisticRegression;
  if (name == "mlp") return ObjectiveKind::kMlp;
  throw ArgumentError("unknown objective kind '" + name + "'");
}

void Dataset::validate() const {
  if (classes < 2) throw ArgumentError("Dataset: classes must be >= 2");
  if (cols == 0) throw ArgumentError("Dataset: cols must be >= 1");
  if (features.size() != rows * cols) throw ArgumentError("Dataset: feature size mismatch");
  if (labels.size() != rows) throw ArgumentError("Dataset: row count != label count");
  for (auto l : labels) {
    if (l >= classes) throw ArgumentError("Dataset: label out of range");
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw ArgumentError("Dataset: non-finite feature");
  }
}

// ---------------------------------------------------------------------------
// Objective

void Objective::check_args(const DenseVector& x, std::span<const std::size_t> batch) const {
  if (x.size() != dim()) {
    throw ArgumentError("objective: x has length " + std::to_string(x.size()) +
                        ", expected " + std::to_string(dim()));
  }
  if (batch.empty()) throw ArgumentError("objective: empty batch");
  const std::size_t n = num_samples();
  for (std::size_t i : batch) {
    if (i >= n) throw ArgumentError("objective: sample index out of range");
  }
}

DenseVector Objective::minibatch_gradient(const DenseVector& x,
                                          std::span<const std::size_t> batch) const {
  DenseVector g(dim());
  evaluate(x, batch, &g);
  return g;
}

DenseVector Objective::full_gradient(const DenseVector& x) const {
  const auto idx = iota_indices(num_samples());
  return minibatch_gradient(x, idx);
}

double Objective::loss(const DenseVector& x, std::span<const std::size_t> batch) const {
  return evaluate(x, batch, nullptr);
}

double Objective::full_loss(const DenseVector& x) const {
  const auto idx = iota_indices(num_samples());
  return evaluate(x, idx, nullptr);
}

double Objective::full_loss_and_gradient(const DenseVector& x, DenseVector& grad) const {
  const auto idx = iota_indices(num_samples());
  return evaluate(x, idx, &grad);
}

// ---------------------------------------------------------------------------
// QuadraticObjective

QuadraticObjective::QuadraticObjective(std::vector<double> spectrum, std::size_t num_samples,
                                       std::vector<double> centers, double epsilon,
                                       double initial_value)
    : spectrum_(std::move(spectrum)),
      n_(num_samples),
      centers_(std::move(centers)),
      epsilon_(epsilon),
      initial_value_(initial_value),
      mean_(spectrum_.empty() ? 1 : spectrum_.size()) {
  const std::size_t d = spectrum_.size();
  if (d == 0) throw ArgumentError("quadratic: empty spectrum");
  if (n_ == 0) throw ArgumentError("quadratic: num_samples must be >= 1");
  if (centers_.size() != n_ * d) throw ArgumentError("quadratic: centers must be n x d");
  if (!(epsilon_ >= 0.0)) throw ArgumentError("quadratic: epsilon must be >= 0");
  for (double a : spectrum_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("quadratic: spectrum must be positive");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean_[j] += centers_[i * d + j];
  }
  for (std::size_t j = 0; j < d; ++j) mean_[j] /= static_cast<double>(n_);
  double spread = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double var = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double dc = centers_[i * d + j] - mean_[j];
      var += dc * dc;
    }
    spread += spectrum_[j] * var / static_cast<double>(n_);
  }
  offset_ = 0.5 * spread;
}

double QuadraticObjective::evaluate(const DenseVector& x, std::span<const std::size_t> batch,
                                    DenseVector* grad) const {
  check_args(x, batch);
  const std::size_t d = dim();
  // Mean of the selected centers; the loss and gradient only need it and the
  // mean squared deviation.
  std::vector<double> cbar(d, 0.0);
  double sq = 0.0;
  for (std::size_t i : batch) {
    const double* c = centers_.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) {
      const double r = x[j] - c[j];
      sq += spectrum_[j] * r * r;
      cbar[j] += c[j];
    }
  }
  const double b = static_cast<double>(batch.size());
  double loss = 0.5 * sq / b - offset_;
  for (std::size_t j = 0; j < d; ++j) loss += epsilon_ * (1.0 + std::sin(x[j]));
  if (grad != nullptr) {
    if (grad->size() != d) *grad = DenseVector(d);
    for (std::size_t j = 0; j < d; ++j) {
      (*grad)[j] = spectrum_[j] * (x[j] - cbar[j] / b) + epsilon_ * std::cos(x[j]);
    }
  }
  return loss;
}

DenseVector QuadraticObjective::initial_point(RngStream&) const {
  return DenseVector(dim(), initial_value_);
}

std::optional<double> QuadraticObjective::exact_lipschitz() const {
  return *std::max_element(spectrum_.begin(), spectrum_.end()) + epsilon_;
}

double QuadraticObjective::infimum() const {
  // Full loss = sum_j h_j(x_j) with h_j(t) = a/2 (t - m)^2 + eps (1 + sin t),
  // up to the constant offset which cancels the spread term.
  double total = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) {
    const double a = spectrum_[j];
    const double m = mean_[j];
    if (epsilon_ == 0.0) continue;
    auto h = [&](double t) { return 0.5 * a * (t - m) * (t - m) + epsilon_ * (1.0 + std::sin(t)); };
    auto dh = [&](double t) { return a * (t - m) + epsilon_ * std::cos(t); };
    auto d2h = [&](double t) { return a - epsilon_ * std::sin(t); };
    // h(m) <= 2 eps bounds the minimizer to |t - m| <= 2 sqrt(eps / a).
    const double r = 2.0 * std::sqrt(epsilon_ / a) + 1e-9;
    constexpr int kGrid = 20000;
    double best_t = m;
    double best = h(m);
    for (int s = 0; s <= kGrid; ++s) {
      const double t = m - r + 2.0 * r * s / kGrid;
      const double v = h(t);
      if (v < best) {
        best = v;
        best_t = t;
      }
    }
    // Newton polish from the best grid point.
    double t = best_t;
    for (int it = 0; it < 50; ++it) {
      const double c = d2h(t);
      if (c <= 0.0) break;
      const double step = dh(t) / c;
      t -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    total += std::min(best, h(t));
  }
  return total;
}

DenseVector QuadraticObjective::minimizer() const {
  if (epsilon_ != 0.0) {
    throw UndefinedValueError("quadratic: minimizer has no closed form when epsilon > 0");
  }
  return mean_;
}

// ---------------------------------------------------------------------------
// Classification objectives

ClassificationObjective::ClassificationObjective(std::shared_ptr<const Dataset> data)
    : data_(std::move(data)) {
  if (!data_) throw ArgumentError("classification objective: null dataset");
  data_->validate();
  if (data_->rows == 0) throw ArgumentError("classification objective: empty dataset");
}

SoftmaxRegression::SoftmaxRegression(std::shared_ptr<const Dataset> data)
    : ClassificationObjective(std::move(data)) {}

std::size_t SoftmaxRegression::dim() const {
  return static_cast<std::size_t>(data_->classes) * (data_->cols + 1);
}

double SoftmaxRegression::evaluate(const DenseVector& x, std::span<const std::size_t> batch,
                                   DenseVector* grad) const {
  check_args(x, batch);
  const auto C = static_cast<Eigen::Index>(data_->classes);
  const auto p = static_cast<Eigen::Index>(data_->cols);
  ConstMatMap W(x.data(), C, p);
  ConstVecMap b(x.data() + C * p, C);
  RowMat gW;
  Eigen::VectorXd gb;
  if (grad != nullptr) {
    gW = RowMat::Zero(C, p);
    gb = Eigen::VectorXd::Zero(C);
  }
  double total = 0.0;
  for (std::size_t start = 0; start < batch.size(); start += kChunkRows) {
    const auto chunk = batch.subspan(start, std::min(kChunkRows, batch.size() - start));
    const RowMat X = gather_rows(*data_, chunk);
    RowMat Z = X * W.transpose();
    Z.rowwise() += b.transpose();
    total += softmax_xent(Z, *data_, chunk);
    if (grad != nullptr) {
      subtract_onehot(Z, *data_, chunk);
      gW.noalias() += Z.transpose() * X;
      gb += Z.colwise().sum().transpose();
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  if (grad != nullptr) {
    if (grad->size() != dim()) *grad = DenseVector(dim());
    MatMap(grad->data(), C, p) = gW * inv;
    VecMap(grad->data() + C * p, C) = gb * inv;
  }
  return total * inv;
}

DenseVector SoftmaxRegression::initial_point(RngStream&) const { return DenseVector(dim()); }

std::vector<int> SoftmaxRegression::predict(const DenseVector& x, const Dataset& test) const {
  if (x.size() != dim()) throw ArgumentError("predict: x has wrong length");
  if (test.cols != data_->cols) throw ArgumentError("predict: feature count mismatch");
  const auto C = static_cast<Eigen::Index>(data_->classes);
  const auto p = static_cast<Eigen::Index>(data_->cols);
  ConstMatMap W(x.data(), C, p);
  ConstVecMap b(x.data() + C * p, C);
  std::vector<int> out(test.rows);
  const auto idx = iota_indices(test.rows);
  for (std::size_t start = 0; start < test.rows; start += kChunkRows) {
    const auto chunk = std::span<const std::size_t>(idx).subspan(
        start, std::min(kChunkRows, test.rows - start));
    const RowMat X = gather_rows(test, chunk);
    RowMat Z = X * W.transpose();
    Z.rowwise() += b.transpose();
    for (Eigen::Index r = 0; r < Z.rows(); ++r) {
      Eigen::Index arg;
      Z.row(r).maxCoeff(&arg);
      out[start + static_cast<std::size_t>(r)] = static_cast<int>(arg);
    }
  }
  return out;
}

MlpObjective::MlpObjective(std::shared_ptr<const Dataset> data, std::size_t hidden)
    : ClassificationObjective(std::move(data)), hidden_(hidden) {
  if (hidden_ == 0) throw ArgumentError("mlp: hidden width must be >= 1");
}

std::size_t MlpObjective::dim() const {
  const std::size_t p = data_->cols;
  const auto C = static_cast<std::size_t>(data_->classes);
  return hidden_ * p + hidden_ + C * hidden_ + C;
}

double MlpObjective::evaluate(const DenseVector& x, std::span<const std::size_t> batch,
                              DenseVector* grad) const {
  check_args(x, batch);
  const auto h = static_cast<Eigen::Index>(hidden_);
  const auto p = static_cast<Eigen::Index>(data_->cols);
  const auto C = static_cast<Eigen::Index>(data_->classes);
  const double* base = x.data();
  ConstMatMap W1(base, h, p);
  ConstVecMap b1(base + h * p, h);
  ConstMatMap W2(base + h * p + h, C, h);
  ConstVecMap b2(base + h * p + h + C * h, C);

  RowMat gW1, gW2;
  Eigen::VectorXd gb1, gb2;
  if (grad != nullptr) {
    gW1 = RowMat::Zero(h, p);
    gb1 = Eigen::VectorXd::Zero(h);
    gW2 = RowMat::Zero(C, h);
    gb2 = Eigen::VectorXd::Zero(C);
  }
  double total = 0.0;
  for (std::size_t start = 0; start < batch.size(); start += kChunkRows) {
    const auto chunk = batch.subspan(start, std::min(kChunkRows, batch.size() - start));
    const RowMat X = gather_rows(*data_, chunk);
    RowMat H = X * W1.transpose();
    H.rowwise() += b1.transpose();
    H = H.array().tanh().matrix();
    RowMat Z = H * W2.transpose();
    Z.rowwise() += b2.transpose();
    total += softmax_xent(Z, *data_, chunk);
    if (grad != nullptr) {
      subtract_onehot(Z, *data_, chunk);  // Z is now dL/dlogits
      gW2.noalias() += Z.transpose() * H;
      gb2 += Z.colwise().sum().transpose();
      RowMat dH = Z * W2;
      dH.array() *= 1.0 - H.array().square();
      gW1.noalias() += dH.transpose() * X;
      gb1 += dH.colwise().sum().transpose();
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  if (grad != nullptr) {
    if (grad->size() != dim()) *grad = DenseVector(dim());
    double* g = grad->data();
    MatMap(g, h, p) = gW1 * inv;
    VecMap(g + h * p, h) = gb1 * inv;
    MatMap(g + h * p + h, C, h) = gW2 * inv;
    VecMap(g + h * p + h + C * h, C) = gb2 * inv;
  }
  return total * inv;
}

DenseVector MlpObjective::initial_point(RngStream& rng) const {
  const std::size_t p = data_->cols;
  const auto C = static_cast<std::size_t>(data_->classes);
  DenseVector x(dim());
  const double a1 = std::sqrt(6.0 / static_cast<double>(p + hidden_));
  for (std::size_t i = 0; i < hidden_ * p; ++i) x[i] = sample_uniform(rng, -a1, a1);
  const std::size_t w2 = hidden_ * p + hidden_;
  const double a2 = std::sqrt(6.0 / static_cast<double>(hidden_ + C));
  for (std::size_t i = 0; i < C * hidden_; ++i) x[w2 + i] = sample_uniform(rng, -a2, a2);
  return x;
}

std::vector<int> MlpObjective::predict(const DenseVector& x, const Dataset& test) const {
  if (x.size() != dim()) throw ArgumentError("predict: x has wrong length");
  if (test.cols != data_->cols) throw ArgumentError("predict: feature count mismatch");
  const auto h = static_cast<Eigen::Index>(hidden_);
  const auto p = static_cast<Eigen::Index>(data_->cols);
  const auto C = static_cast<Eigen::Index>(data_->classes);
  const double* base = x.data();
  ConstMatMap W1(base, h, p);
  ConstVecMap b1(base + h * p, h);
  ConstMatMap W2(base + h * p + h, C, h);
  ConstVecMap b2(base + h * p + h + C * h, C);
  std::vector<int> out(test.rows);
  const auto idx = iota_indices(test.rows);
  for (std::size_t start = 0; start < test.rows; start += kChunkRows) {
    const auto chunk = std::span<const std::size_t>(idx).subspan(
        start, std::min(kChunkRows, test.rows - start));
    const RowMat X = gather_rows(test, chunk);
    RowMat H = X * W1.transpose();
    H.rowwise() += b1.transpose();
    H = H.array().tanh().matrix();
    RowMat Z = H * W2.transpose();
    Z.rowwise() += b2.transpose();
    for (Eigen::Index r = 0; r < Z.rows(); ++r) {
      Eigen::Index arg;
      Z.row(r).maxCoeff(&arg);
      out[start + static_cast<std::size_t>(r)] = static_cast<int>(arg);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free functions

std::vector<std::size_t> sample_minibatch(std::size_t n, std::size_t batch_size,
                                          RngStream& rng) {
  if (n == 0) throw ArgumentError("sample_minibatch: n must be >= 1");
  if (batch_size == 0) throw ArgumentError("sample_minibatch: batch_size must be >= 1");
  if (batch_size >= n) return iota_indices(n);
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
  return idx;
}

double probe_lipschitz(const Objective& obj, std::size_t probes, RngStream& rng,
                       double radius) {
  if (probes < 2) throw ArgumentError("probe_lipschitz: probes must be >= 2");
  const DenseVector x0 = obj.initial_point(rng);
  double best = 0.0;
  for (std::size_t s = 0; s < probes; ++s) {
    DenseVector x = x0;
    DenseVector y = x0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] += radius * sample_standard_normal(rng);
      y[j] = x[j] + 1e-2 * radius * sample_standard_normal(rng);
    }
    const double num = norm(subtract(obj.full_gradient(x), obj.full_gradient(y)));
    const double den = norm(subtract(x, y));
    if (den > 0.0) best = std::max(best, num / den);
  }
  return best;
}

double estimate_lipschitz(const Objective& obj, std::size_t probes, RngStream& rng) {
  if (probes < 2) throw ArgumentError("estimate_lipschitz: probes must be >= 2");
  if (auto L = obj.exact_lipschitz()) return *L;
  return probe_lipschitz(obj, probes, rng);
}

double estimate_gradient_variance(const Objective& obj, const DenseVector& x,
                                  std::size_t batch_size, std::size_t draws,
                                  RngStream& rng) {
  if (draws == 0) throw ArgumentError("estimate_gradient_variance: draws must be >= 1");
  const DenseVector full = obj.full_gradient(x);
  double total = 0.0;
  for (std::size_t s = 0; s < draws; ++s) {
    const auto batch = sample_minibatch(obj.num_samples(), batch_size, rng);
    total += norm_sq(subtract(obj.minibatch_gradient(x, batch), full));
  }
  return total / static_cast<double>(draws);
}

double accuracy(const ClassificationObjective& obj, const DenseVector& x,
                const Dataset& test) {
  if (test.rows == 0) throw ArgumentError("accuracy: empty test set");
  const auto pred = obj.predict(x, test);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < test.rows; ++i) {
    if (pred[i] == static_cast<int>(test.labels[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(test.rows);
}

namespace {

class GzFile {
 public:
  explicit GzFile(const std::string& path) : f_(gzopen(path.c_str(), "rb")) {
    if (f_ == nullptr) {
      throw IdxFormatError(IdxFormatError::Kind::kIo, "cannot open " + path);
    }
  }
  ~GzFile() { gzclose(f_); }
  GzFile(const GzFile&) = delete;
  GzFile& operator=(const GzFile&) = delete;

  // Reads exactly n bytes or throws kTruncated.
  void read(void* dst, std::size_t n, const std::string& path) {
    auto* out = static_cast<unsigned char*>(dst);
    while (n > 0) {
      const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(n, 1u << 30));
      const int got = gzread(f_, out, chunk);
      if (got < 0) throw IdxFormatError(IdxFormatError::Kind::kIo, "read error in " + path);
      if (got == 0) throw IdxFormatError(IdxFormatError::Kind::kTruncated, "truncated file " + path);
      out += got;
      n -= static_cast<std::size_t>(got);
    }
  }

  std::uint32_t read_be32(const std::string& path) {
    unsigned char b[4];
    read(b, 4, path);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
           (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
  }

 private:
  gzFile f_;
};

}  // namespace

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path,
                       std::size_t max_rows) {
  GzFile img(images_path);
  const std::uint32_t img_magic = img.read_be32(images_path);
  if (img_magic != 0x00000803u) {
    throw IdxFormatError(IdxFormatError::Kind::kBadMagic,
                         images_path + ": bad image magic " + std::to_string(img_magic));
  }
  const std::uint32_t n_img = img.read_be32(images_path);
  const std::uint32_t rows = img.read_be32(images_path);
  const std::uint32_t cols = img.read_be32(images_path);

  GzFile lab(labels_path);
  const std::uint32_t lab_magic = lab.read_be32(labels_path);
  if (lab_magic != 0x00000801u) {
    throw IdxFormatError(IdxFormatError::Kind::kBadMagic,
                         labels_path + ": bad label magic " + std::to_string(lab_magic));
  }
  const std::uint32_t n_lab = lab.read_be32(labels_path);
  if (n_img != n_lab) {
    throw IdxFormatError(IdxFormatError::Kind::kCountMismatch,
                         "image count " + std::to_string(n_img) + " != label count " +
                             std::to_string(n_lab));
  }

  std::size_t n = n_img;
  if (max_rows > 0) n = std::min<std::size_t>(n, max_rows);
  const std::size_t p = std::size_t{rows} * cols;
  std::vector<unsigned char> pixels(n * p);
  img.read(pixels.data(), pixels.size(), images_path);
  Dataset ds;
  ds.rows = n;
  ds.cols = p;
  ds.classes = 10;
  ds.labels.resize(n);
  lab.read(ds.labels.data(), n, labels_path);
  for (std::size_t i = 0; i < n; ++i) {
    if (ds.labels[i] > 9) {
      throw IdxFormatError(IdxFormatError::Kind::kBadLabel,
                           labels_path + ": label " + std::to_string(ds.labels[i]) +
                               " at row " + std::to_string(i));
    }
  }
  ds.features.resize(n * p);
  for (std::size_t i = 0; i < n * p; ++i) ds.features[i] = pixels[i] / 255.0;
  return ds;
}

std::shared_ptr<QuadraticObjective> synthetic_quadratic(std::size_t dim, std::size_t n,
                                                        std::vector<double> spectrum,
                                                        std::uint64_t seed, double spread,
                                                        double epsilon, double initial_value) {
  if (spectrum.size() != dim) throw ArgumentError("synthetic_quadratic: spectrum length != dim");
  if (!(spread >= 0.0)) throw ArgumentError("synthetic_quadratic: spread must be >= 0");
  RngStream rng(seed, streams::kInit);
  std::vector<double> centers(n * dim);
  for (double& c : centers) c = spread == 0.0 ? 0.0 : spread * sample_standard_normal(rng);
  return std::make_shared<QuadraticObjective>(std::move(spectrum), n, std::move(centers),
                                              epsilon, initial_value);
}

Dataset synthetic_blobs(int classes, std::size_t n, std::size_t p, double separation,
                        std::uint64_t seed) {
  if (classes < 2) throw ArgumentError("synthetic_blobs: classes must be >= 2");
  if (n == 0 || p == 0) throw ArgumentError("synthetic_blobs: n and p must be >= 1");
  if (!(separation >= 0.0)) throw ArgumentError("synthetic_blobs: separation must be >= 0");
  RngStream rng(seed, streams::kInit);
  std::vector<double> means(static_cast<std::size_t>(classes) * p);
  for (double& m : means) m = separation * sample_standard_normal(rng);
  Dataset ds;
  ds.rows = n;
  ds.cols = p;
  ds.classes = classes;
  ds.features.resize(n * p);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(i % static_cast<std::size_t>(classes));
    ds.labels[i] = static_cast<std::uint8_t>(c);
    for (std::size_t j = 0; j < p; ++j) {
      ds.features[i * p + j] = means[c * p + j] + sample_standard_normal(rng);
    }
  }
  return ds;
}

}  // namespace sasgd
