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
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sasgd/delaymodel.h"
#include "sasgd/objectives.h"
#include "sasgd/optimizer.h"

namespace sasgd {

/// Scalar or array value of the flat key/value config format:
///
///   # comment
///   key = "string" | 12 | 0.5 | true | [1, 2, 3]
///   [section]          # later keys become section.key
///   section.key = ...  # same thing
struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<bool, std::int64_t, double, std::string, Array> v;

  friend bool operator==(const ConfigValue&, const ConfigValue&) = default;
};

using ConfigDoc = std::vector<std::pair<std::string, ConfigValue>>;

// Throws ConfigError (with the key, or "line N") on syntax errors and on
// repeated keys.
ConfigDoc parse_config_text(const std::string& text);
ConfigDoc parse_config_file(const std::string& path);
std::string serialize_config(const ConfigDoc& doc);
std::string format_value(const ConfigValue& v);

struct RunConfig {
  std::string run_id = "run";

  ObjectiveKind objective = ObjectiveKind::kMlp;
  // quadratic
  std::size_t quad_dim = 50;
  std::size_t quad_samples = 1000;
  double spectrum_lo = 1.0;
  double spectrum_hi = 2.0;
  double epsilon = 0.0;
  double spread = 1.0;
  double x0_value = 0.0;
  // classifiers
  std::size_t hidden = 128;
  std::string data_source = "mnist";  // mnist | blobs
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  std::size_t max_rows = 0;
  int blob_classes = 10;
  std::size_t blob_samples = 2000;
  std::size_t blob_test_samples = 1000;
  std::size_t blob_features = 20;
  double blob_separation = 1.0;

  Variant variant = Variant::kAsgd;
  double rho = 1.0;
  std::size_t workers = 8;
  DelayConfig delay;
  std::size_t batch_size = 64;
  std::size_t epochs = 5;
  std::size_t updates = 0;  // overrides epochs when > 0

  std::string lr_schedule = "constant";  // constant | inverse_sqrt | horizon
  double lr = 0.01;
  double lr_mu = 1.0;
  double lr_lipschitz = 0.0;  // 0: use the objective's exact constant
  double momentum = 0.5;
  std::uint64_t seed = 0;

  std::size_t sample_period = 0;
  bool stale_norms = false;
  std::size_t mu_window = 0;

  // Directory that relative paths are resolved against. Not serialized.
  std::string base_dir;

  // Throws ConfigError with the key path.
  void validate() const;
  // epochs * n / batch_size unless `updates` is set.
  std::size_t budget(std::size_t num_samples) const;
  std::string resolve(const std::string& path) const;

  // Unknown keys, wrong types and invalid values throw ConfigError.
  static RunConfig from_doc(const ConfigDoc& doc, const std::string& base_dir = "");
  ConfigDoc to_doc() const;
};

RunConfig load_run_config(const std::string& path);

struct GridAxis {
  std::string key;
  std::vector<ConfigValue> values;
};

/// Cartesian product of `grid.<key> = [...]` axes over a base RunConfig.
/// `grid.repeats` seeds per cell; repeat r runs with seed base.seed + r.
struct GridSpec {
  ConfigDoc base;
  std::string base_dir;
  std::vector<GridAxis> axes;
  std::size_t repeats = 1;

  std::size_t cell_count() const;
  // Axis values for cell `index`; the first axis varies slowest.
  std::vector<std::pair<std::string, ConfigValue>> cell_values(std::size_t index) const;
  RunConfig cell_config(std::size_t index, std::size_t repeat) const;

  static GridSpec from_doc(const ConfigDoc& doc, const std::string& base_dir = "");
};

GridSpec load_grid_spec(const std::string& path);

}  // namespace sasgd
