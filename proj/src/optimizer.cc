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
#include "sasgd/optimizer.h"

#include <cmath>

#include "sasgd/errors.h"

namespace sasgd {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kAsgd: return "ASGD";
    case Variant::kPhiSgd: return "PhiSGD";
    case Variant::kPhiMemSgd: return "PhiMemSGD";
  }
  return "?";
}

Variant variant_from_string(const std::string& name) {
  if (name == "ASGD") return Variant::kAsgd;
  if (name == "PhiSGD") return Variant::kPhiSgd;
  if (name == "PhiMemSGD") return Variant::kPhiMemSgd;
  throw ArgumentError("unknown variant '" + name + "' (expected ASGD, PhiSGD or PhiMemSGD)");
}

LrSchedule LrSchedule::constant(double base) {
  LrSchedule s;
  s.kind = Kind::kConstant;
  s.base = base;
  s.validate();
  return s;
}

LrSchedule LrSchedule::horizon_constant(double rho, double mu, double lipschitz,
                                        std::size_t horizon) {
  LrSchedule s;
  s.kind = Kind::kConstant;
  s.from_constants = true;
  s.rho = rho;
  s.mu = mu;
  s.lipschitz = lipschitz;
  s.horizon = horizon;
  s.validate();
  return s;
}

LrSchedule LrSchedule::inverse_sqrt(double rho, double mu, double lipschitz) {
  LrSchedule s;
  s.kind = Kind::kInverseSqrt;
  s.from_constants = true;
  s.rho = rho;
  s.mu = mu;
  s.lipschitz = lipschitz;
  s.validate();
  return s;
}

void LrSchedule::validate() const {
  if (kind == Kind::kInverseSqrt && !from_constants) {
    throw ArgumentError("inverse_sqrt schedule needs rho, mu and L");
  }
  if (from_constants) {
    if (!(rho > 0.0 && mu > 0.0 && lipschitz > 0.0) || !std::isfinite(rho * mu / lipschitz)) {
      throw ArgumentError("lr schedule: rho, mu and L must be positive and finite");
    }
    if (kind == Kind::kConstant && horizon < 1) {
      throw ArgumentError("lr schedule: constant schedule needs horizon T >= 1");
    }
  } else if (!(base > 0.0) || !std::isfinite(base)) {
    throw ArgumentError("lr schedule: base rate must be positive");
  }
}

double lr_at(const LrSchedule& s, std::size_t t) {
  if (!s.from_constants) return s.base;
  const double scale = s.rho * s.mu / s.lipschitz;
  if (s.kind == LrSchedule::Kind::kInverseSqrt) {
    return scale / std::sqrt(static_cast<double>(t) + 1.0);
  }
  return scale / std::sqrt(static_cast<double>(s.horizon));
}

double transmission_norm_sq(const Transmission& u) {
  if (const auto* d = std::get_if<DenseVector>(&u)) return norm_sq(*d);
  return std::get<SparseUpdate>(u).norm_sq();
}

double transmission_dot(const Transmission& u, const DenseVector& dense) {
  if (const auto* d = std::get_if<DenseVector>(&u)) return dot(*d, dense);
  return std::get<SparseUpdate>(u).dot(dense);
}

DenseVector transmission_densify(const Transmission& u) {
  if (const auto* d = std::get_if<DenseVector>(&u)) return *d;
  return std::get<SparseUpdate>(u).densify();
}

UpdateRule::UpdateRule(Variant variant, std::size_t dim, std::size_t k, double momentum)
    : variant_(variant), k_(k), momentum_(momentum), velocity_(dim) {
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ArgumentError("momentum must be in [0, 1)");
  }
  if (variant != Variant::kAsgd && (k < 1 || k > dim)) {
    throw ArgumentError("k must be in [1, d]");
  }
}

Transmission UpdateRule::encode(const DenseVector& g, MemoryState* mem) const {
  if (g.size() != velocity_.size()) throw ArgumentError("encode: gradient length mismatch");
  const bool wants_mem = variant_ == Variant::kPhiMemSgd;
  if (wants_mem && mem == nullptr) {
    throw ConfigError("memory", "PhiMemSGD requires a memory vector");
  }
  if (!wants_mem && mem != nullptr) {
    throw ConfigError("memory", to_string(variant_) + " does not use a memory vector");
  }
  switch (variant_) {
    case Variant::kAsgd: return g;
    case Variant::kPhiSgd: return top_k(g, k_);
    case Variant::kPhiMemSgd: return memory_combine_in_place(*mem, g, k_);
  }
  return g;
}

void UpdateRule::apply(DenseVector& x, const Transmission& u, double eta) {
  if (x.size() != velocity_.size()) throw ArgumentError("apply: x length mismatch");
  if (momentum_ == 0.0) {
    // v = u exactly; touch only the support for sparse u.
    if (const auto* d = std::get_if<DenseVector>(&u)) {
      velocity_ = *d;
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * velocity_[i];
    } else {
      const auto& s = std::get<SparseUpdate>(u);
      velocity_.fill(0.0);
      for (const auto& e : s.entries()) {
        velocity_[e.index] = e.value;
        x[e.index] -= eta * e.value;
      }
    }
    return;
  }
  for (double& v : velocity_) v *= momentum_;
  if (const auto* d = std::get_if<DenseVector>(&u)) {
    for (std::size_t i = 0; i < x.size(); ++i) velocity_[i] += (*d)[i];
  } else {
    for (const auto& e : std::get<SparseUpdate>(u).entries()) velocity_[e.index] += e.value;
  }
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * velocity_[i];
}

ApplyResult apply_update(UpdateRule& rule, const DenseVector& x, const DenseVector& g,
                         MemoryState* mem, double eta) {
  Transmission u = rule.encode(g, mem);
  DenseVector next = x;
  rule.apply(next, u, eta);
  return {std::move(next), std::move(u)};
}

}  // namespace sasgd
