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

#include <stdexcept>
#include <string>

namespace sasgd {

// Bad argument to a library call (wrong length, out-of-range parameter).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A quantity is mathematically undefined for the given input, e.g. the
// cosine similarity of a zero vector.
class UndefinedValueError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid run/grid configuration. `key()` names the offending key path when
// one is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Theorem bound whose denominator is not positive for the supplied schedule.
class BoundInapplicableError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace sasgd
