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
#include <variant>

#include "sasgd/numkit.h"
#include "sasgd/sparsifier.h"

namespace sasgd {

enum class Variant { kAsgd, kPhiSgd, kPhiMemSgd };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// Step-size schedule.
///
/// constant: either a plain base rate, or rho*mu / (L sqrt(T)) for a horizon T.
/// inverse_sqrt: rho*mu / (L sqrt(t + 1)).
struct LrSchedule {
  enum class Kind { kConstant, kInverseSqrt };

  Kind kind = Kind::kConstant;
  double base = 0.01;  // plain constant only
  bool from_constants = false;
  double rho = 1.0;
  double mu = 1.0;
  double lipschitz = 1.0;
  std::size_t horizon = 0;

  static LrSchedule constant(double base);
  static LrSchedule horizon_constant(double rho, double mu, double lipschitz,
                                     std::size_t horizon);
  static LrSchedule inverse_sqrt(double rho, double mu, double lipschitz);

  // Throws ArgumentError if any rate it would produce is not positive.
  void validate() const;
};

double lr_at(const LrSchedule& s, std::size_t t);

// What a worker sends: the raw gradient (ASGD) or a top-k selection.
using Transmission = std::variant<DenseVector, SparseUpdate>;

double transmission_norm_sq(const Transmission& u);
double transmission_dot(const Transmission& u, const DenseVector& dense);
DenseVector transmission_densify(const Transmission& u);

/// Worker-side encoding plus PS-side application with heavy-ball momentum.
///
/// The PS keeps the velocity: v <- momentum * v + u, x <- x - eta * v. The
/// momentum therefore acts on the already sparsified direction, and the wire
/// payload stays k entries long. momentum = 0 is plain SGD on u.
class UpdateRule {
 public:
  UpdateRule(Variant variant, std::size_t dim, std::size_t k, double momentum);

  Variant variant() const { return variant_; }
  std::size_t k() const { return k_; }
  double momentum() const { return momentum_; }
  const DenseVector& velocity() const { return velocity_; }

  // `mem` must be non-null exactly for PhiMemSGD (ConfigError otherwise); it
  // is updated in place.
  Transmission encode(const DenseVector& g, MemoryState* mem) const;
  void apply(DenseVector& x, const Transmission& u, double eta);

 private:
  Variant variant_;
  std::size_t k_;
  double momentum_;
  DenseVector velocity_;
};

struct ApplyResult {
  DenseVector x_next;
  Transmission transmitted;
};

// One full step: encode g at the worker (updating *mem for PhiMemSGD), then
// apply at the PS.
ApplyResult apply_update(UpdateRule& rule, const DenseVector& x, const DenseVector& g,
                         MemoryState* mem, double eta);

}  // namespace sasgd
