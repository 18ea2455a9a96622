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
#include "sasgd/sparsifier.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sasgd/errors.h"

namespace sasgd {

SparseUpdate::SparseUpdate(std::size_t dim, std::vector<SparseEntry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (dim_ == 0) throw ArgumentError("SparseUpdate: dim must be >= 1");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].index >= dim_) {
      throw ArgumentError("SparseUpdate: index out of range");
    }
    if (i > 0 && entries_[i].index <= entries_[i - 1].index) {
      throw ArgumentError("SparseUpdate: indices must be strictly increasing");
    }
    if (entries_[i].value == 0.0) {
      throw ArgumentError("SparseUpdate: zero-valued entry");
    }
  }
}

DenseVector SparseUpdate::densify() const {
  DenseVector out(dim_);
  for (const auto& e : entries_) out[e.index] = e.value;
  return out;
}

void SparseUpdate::add_to(DenseVector& y, double alpha) const {
  if (y.size() != dim_) throw ArgumentError("SparseUpdate::add_to: length mismatch");
  for (const auto& e : entries_) y[e.index] += alpha * e.value;
}

double SparseUpdate::dot(const DenseVector& dense) const {
  if (dense.size() != dim_) throw ArgumentError("SparseUpdate::dot: length mismatch");
  double s = 0.0;
  for (const auto& e : entries_) s += e.value * dense[e.index];
  return s;
}

double SparseUpdate::norm_sq() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.value * e.value;
  return s;
}

std::string SparseUpdate::to_string() const {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0) out.push_back(';');
    out += std::to_string(entries_[i].index);
    out.push_back(':');
    auto res = std::to_chars(buf, buf + sizeof(buf), entries_[i].value);
    out.append(buf, res.ptr);
  }
  return out;
}

SparseUpdate SparseUpdate::parse(std::size_t dim, const std::string& text) {
  std::vector<SparseEntry> entries;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ArgumentError("SparseUpdate::parse: missing ':' in '" + item + "'");
    }
    SparseEntry e{};
    const char* b = item.data();
    auto r1 = std::from_chars(b, b + colon, e.index);
    auto r2 = std::from_chars(b + colon + 1, b + item.size(), e.value);
    if (r1.ec != std::errc() || r2.ec != std::errc() ||
        r2.ptr != b + item.size()) {
      throw ArgumentError("SparseUpdate::parse: bad entry '" + item + "'");
    }
    entries.push_back(e);
  }
  return SparseUpdate(dim, std::move(entries));
}

std::size_t k_from_rho(double rho, std::size_t dim) {
  if (!(rho > 0.0 && rho <= 1.0)) throw ArgumentError("rho must be in (0, 1]");
  if (dim == 0) throw ArgumentError("dim must be >= 1");
  const auto k = static_cast<std::size_t>(std::llround(rho * static_cast<double>(dim)));
  return std::clamp<std::size_t>(k, 1, dim);
}

SparseUpdate top_k(const DenseVector& u, std::size_t k) {
  const std::size_t d = u.size();
  if (k < 1 || k > d) {
    throw ArgumentError("top_k: k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(d) + "]");
  }
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (k < d) {
    // Total order: larger magnitude first, then lower index.
    auto before = [&u](std::size_t a, std::size_t b) {
      const double ma = std::fabs(u[a]);
      const double mb = std::fabs(u[b]);
      return ma > mb || (ma == mb && a < b);
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     idx.end(), before);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
  }
  std::vector<SparseEntry> entries;
  entries.reserve(k);
  for (std::size_t i : idx) {
    if (u[i] != 0.0) entries.push_back({i, u[i]});
  }
  return SparseUpdate(d, std::move(entries));
}

bool check_k_contraction(const DenseVector& u, std::size_t k) {
  const SparseUpdate kept = top_k(u, k);
  DenseVector residual = u;
  for (const auto& e : kept.entries()) residual[e.index] = 0.0;
  const double lhs = norm_sq(residual);
  const double total = norm_sq(u);
  const double rhs = (1.0 - static_cast<double>(k) / static_cast<double>(u.size())) * total;
  return lhs <= rhs + 1e-12 * total;
}

bool check_lower_bound(const DenseVector& u, std::size_t k) {
  const double kept = top_k(u, k).norm_sq();
  const double total = norm_sq(u);
  const double rhs = static_cast<double>(k) / static_cast<double>(u.size()) * total;
  return kept >= rhs - 1e-12 * total;
}

SparseUpdate memory_combine_in_place(MemoryState& mem, const DenseVector& g,
                                     std::size_t k) {
  DenseVector& m = mem.vector();
  if (m.size() != g.size()) {
    throw ArgumentError("memory_combine: memory/gradient length mismatch");
  }
  for (std::size_t i = 0; i < m.size(); ++i) m[i] += g[i];
  SparseUpdate update = top_k(m, k);
  for (const auto& e : update.entries()) m[e.index] = 0.0;
  return update;
}

MemoryCombineResult memory_combine(const MemoryState& mem, const DenseVector& g,
                                   std::size_t k) {
  MemoryState next = mem;
  SparseUpdate update = memory_combine_in_place(next, g, k);
  return {std::move(update), std::move(next)};
}

}  // namespace sasgd
