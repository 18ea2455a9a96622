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
#include <string>
#include <vector>

#include "sasgd/numkit.h"

namespace sasgd {

struct SparseEntry {
  std::size_t index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse view of a d-dimensional vector: what a worker puts on the wire.
///
/// Entries have strictly increasing indices in [0, dim) and non-zero values,
/// so densify() has exactly entries().size() non-zeros.
class SparseUpdate {
 public:
  SparseUpdate(std::size_t dim, std::vector<SparseEntry> entries);

  std::size_t dim() const { return dim_; }
  const std::vector<SparseEntry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }

  DenseVector densify() const;
  // y <- y + alpha * this
  void add_to(DenseVector& y, double alpha) const;
  double dot(const DenseVector& dense) const;
  double norm_sq() const;

  // "idx:val;idx:val" with shortest round-trip values (diagnostic logs).
  std::string to_string() const;
  static SparseUpdate parse(std::size_t dim, const std::string& text);

  friend bool operator==(const SparseUpdate&, const SparseUpdate&) = default;

 private:
  std::size_t dim_;
  std::vector<SparseEntry> entries_;
};

// k = max(1, round(rho * d)), capped at d. rho must be in (0, 1].
std::size_t k_from_rho(double rho, std::size_t dim);

// Keeps the k entries of largest magnitude; equal magnitudes keep the lower
// index. Zero-valued survivors are dropped from the entry list.
SparseUpdate top_k(const DenseVector& u, std::size_t k);

// ||u - top_k(u)||^2 <= (1 - k/d) ||u||^2, relative slack 1e-12.
bool check_k_contraction(const DenseVector& u, std::size_t k);
// ||top_k(u)||^2 >= (k/d) ||u||^2, relative slack 1e-12.
bool check_lower_bound(const DenseVector& u, std::size_t k);

/// Error-feedback accumulator owned by one worker. Starts at zero.
class MemoryState {
 public:
  explicit MemoryState(std::size_t dim) : m_(dim) {}
  explicit MemoryState(DenseVector m) : m_(std::move(m)) {}

  const DenseVector& vector() const { return m_; }
  DenseVector& vector() { return m_; }
  std::size_t dim() const { return m_.size(); }

 private:
  DenseVector m_;
};

struct MemoryCombineResult {
  SparseUpdate update;
  MemoryState memory;
};

// update = top_k(m + g), new memory = (m + g) - update. For every coordinate
// exactly one of the two outputs carries (m + g)_i, so the split is exact.
MemoryCombineResult memory_combine(const MemoryState& mem, const DenseVector& g,
                                   std::size_t k);
// In-place variant used on the simulation hot path.
SparseUpdate memory_combine_in_place(MemoryState& mem, const DenseVector& g,
                                     std::size_t k);

}  // namespace sasgd
