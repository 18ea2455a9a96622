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
#include "sasgd/config.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sasgd/errors.h"
#include "sasgd/metrics.h"

namespace sasgd {

namespace {

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class LineParser {
 public:
  LineParser(const std::string& text, std::string where) : s_(text), where_(std::move(where)) {}

  ConfigValue value() {
    skip_ws();
    if (eof()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"') return {string_lit()};
    if (c == '[') return array();
    return scalar_word();
  }

  void expect_end() {
    skip_ws();
    if (!eof() && s_[pos_] != '#') fail("unexpected text after value");
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  void skip_ws() {
    while (!eof() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(where_, msg); }

  std::string string_lit() {
    ++pos_;  // opening quote
    std::string out;
    while (true) {
      if (eof()) fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: fail(std::string("unknown escape \\") + e);
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  ConfigValue array() {
    ++pos_;  // '['
    ConfigValue::Array items;
    skip_ws();
    if (!eof() && s_[pos_] == ']') {
      ++pos_;
      return {items};
    }
    while (true) {
      skip_ws();
      if (!eof() && s_[pos_] == '[') fail("nested arrays are not supported");
      items.push_back(value());
      skip_ws();
      if (eof()) fail("unterminated array");
      if (s_[pos_] == ',') {
        ++pos_;
        skip_ws();
        if (!eof() && s_[pos_] == ']') {  // trailing comma
          ++pos_;
          break;
        }
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        break;
      }
      fail("expected ',' or ']' in array");
    }
    return {items};
  }

  ConfigValue scalar_word() {
    const std::size_t start = pos_;
    while (!eof() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' &&
           s_[pos_] != ' ' && s_[pos_] != '\t' && s_[pos_] != '\r') {
      ++pos_;
    }
    const std::string word = s_.substr(start, pos_ - start);
    if (word == "true") return {true};
    if (word == "false") return {false};
    const char* b = word.data();
    const char* e = b + word.size();
    if (word.find_first_of(".eE") == std::string::npos) {
      std::int64_t i = 0;
      auto r = std::from_chars(b, e, i);
      if (r.ec == std::errc() && r.ptr == e) return {i};
    }
    double d = 0.0;
    const char* db = (b != e && *b == '+') ? b + 1 : b;
    auto r = std::from_chars(db, e, d);
    if (r.ec == std::errc() && r.ptr == e && std::isfinite(d)) return {d};
    fail("cannot parse value '" + word + "'");
  }

  const std::string& s_;
  std::string where_;
  std::size_t pos_ = 0;
};

}  // namespace

ConfigDoc parse_config_text(const std::string& text) {
  ConfigDoc doc;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      const auto close = line.find(']');
      if (close == std::string::npos) throw ConfigError(where, "unterminated section header");
      const std::string rest = trim(line.substr(close + 1));
      if (!rest.empty() && rest[0] != '#') throw ConfigError(where, "text after section header");
      section = trim(line.substr(1, close - 1));
      for (char c : section) {
        if (!is_key_char(c)) throw ConfigError(where, "bad section name '" + section + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where, "empty key");
    for (char c : key) {
      if (!is_key_char(c)) throw ConfigError(where, "bad key '" + key + "'");
    }
    if (!section.empty()) key = section + "." + key;
    if (seen.count(key)) {
      throw ConfigError(key, "duplicate key (first at line " + std::to_string(seen[key]) + ")");
    }
    seen[key] = lineno;
    const std::string rhs = line.substr(eq + 1);
    LineParser p(rhs, key);
    ConfigValue v = p.value();
    p.expect_end();
    doc.emplace_back(std::move(key), std::move(v));
  }
  return doc;
}

ConfigDoc parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string format_value(const ConfigValue& v) {
  struct Fmt {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      std::string s = format_double(d);
      // Keep the type on re-parse: "1" would come back as an integer.
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      return s;
    }
    std::string operator()(const std::string& s) const {
      std::string out = "\"";
      for (char c : s) {
        switch (c) {
          case '"': out += "\\\""; break;
          case '\\': out += "\\\\"; break;
          case '\n': out += "\\n"; break;
          case '\t': out += "\\t"; break;
          default: out.push_back(c);
        }
      }
      return out + "\"";
    }
    std::string operator()(const ConfigValue::Array& a) const {
      std::string out = "[";
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_value(a[i]);
      }
      return out + "]";
    }
  };
  return std::visit(Fmt{}, v.v);
}

std::string serialize_config(const ConfigDoc& doc) {
  std::string out;
  for (const auto& [k, v] : doc) out += k + " = " + format_value(v) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// RunConfig

namespace {

std::string type_name(const ConfigValue& v) {
  switch (v.v.index()) {
    case 0: return "bool";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "string";
    default: return "array";
  }
}

std::string get_string(const std::string& key, const ConfigValue& v) {
  if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
  throw ConfigError(key, "expected string, got " + type_name(v));
}

double get_double(const std::string& key, const ConfigValue& v) {
  if (const auto* d = std::get_if<double>(&v.v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v.v)) return static_cast<double>(*i);
  throw ConfigError(key, "expected number, got " + type_name(v));
}

std::size_t get_count(const std::string& key, const ConfigValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v.v)) {
    if (*i < 0) throw ConfigError(key, "must be >= 0");
    return static_cast<std::size_t>(*i);
  }
  throw ConfigError(key, "expected integer, got " + type_name(v));
}

bool get_bool(const std::string& key, const ConfigValue& v) {
  if (const auto* b = std::get_if<bool>(&v.v)) return *b;
  throw ConfigError(key, "expected bool, got " + type_name(v));
}

ConfigValue str(std::string s) { return {std::move(s)}; }
ConfigValue num(double d) { return {d}; }
ConfigValue cnt(std::size_t i) { return {static_cast<std::int64_t>(i)}; }
ConfigValue flag(bool b) { return {b}; }

using Setter = std::function<void(RunConfig&, const std::string&, const ConfigValue&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.id", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.run_id = get_string(k, v); }},
      {"objective.kind",
       [](RunConfig& c, const std::string& k, const ConfigValue& v) {
         try {
           c.objective = objective_kind_from_string(get_string(k, v));
         } catch (const ArgumentError& e) {
           throw ConfigError(k, e.what());
         }
       }},
      {"objective.dim", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.quad_dim = get_count(k, v); }},
      {"objective.samples", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.quad_samples = get_count(k, v); }},
      {"objective.spectrum_lo", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.spectrum_lo = get_double(k, v); }},
      {"objective.spectrum_hi", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.spectrum_hi = get_double(k, v); }},
      {"objective.epsilon", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.epsilon = get_double(k, v); }},
      {"objective.spread", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.spread = get_double(k, v); }},
      {"objective.x0", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.x0_value = get_double(k, v); }},
      {"objective.hidden", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.hidden = get_count(k, v); }},
      {"data.source", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.data_source = get_string(k, v); }},
      {"data.train_images", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.train_images = get_string(k, v); }},
      {"data.train_labels", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.train_labels = get_string(k, v); }},
      {"data.test_images", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.test_images = get_string(k, v); }},
      {"data.test_labels", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.test_labels = get_string(k, v); }},
      {"data.max_rows", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.max_rows = get_count(k, v); }},
      {"data.classes",
       [](RunConfig& c, const std::string& k, const ConfigValue& v) {
         c.blob_classes = static_cast<int>(get_count(k, v));
       }},
      {"data.samples", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.blob_samples = get_count(k, v); }},
      {"data.test_samples", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.blob_test_samples = get_count(k, v); }},
      {"data.features", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.blob_features = get_count(k, v); }},
      {"data.separation", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.blob_separation = get_double(k, v); }},
      {"variant",
       [](RunConfig& c, const std::string& k, const ConfigValue& v) {
         try {
           c.variant = variant_from_string(get_string(k, v));
         } catch (const ArgumentError& e) {
           throw ConfigError(k, e.what());
         }
       }},
      {"rho", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.rho = get_double(k, v); }},
      {"workers", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.workers = get_count(k, v); }},
      {"delay.model",
       [](RunConfig& c, const std::string& k, const ConfigValue& v) {
         c.delay.kind = delay_model_from_string(get_string(k, v));
       }},
      {"delay.variance", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.delay.delay_variance = get_double(k, v); }},
      {"delay.compute_lo", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.delay.compute_lo = get_double(k, v); }},
      {"delay.compute_hi", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.delay.compute_hi = get_double(k, v); }},
      {"delay.constant", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.delay.constant_delay = get_double(k, v); }},
      {"delay.script", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.delay.script_path = get_string(k, v); }},
      {"batch_size", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.batch_size = get_count(k, v); }},
      {"epochs", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.epochs = get_count(k, v); }},
      {"updates", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.updates = get_count(k, v); }},
      {"lr.schedule", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.lr_schedule = get_string(k, v); }},
      {"lr.value", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.lr = get_double(k, v); }},
      {"lr.mu", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.lr_mu = get_double(k, v); }},
      {"lr.lipschitz", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.lr_lipschitz = get_double(k, v); }},
      {"momentum", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.momentum = get_double(k, v); }},
      {"seed",
       [](RunConfig& c, const std::string& k, const ConfigValue& v) {
         c.seed = static_cast<std::uint64_t>(get_count(k, v));
       }},
      {"metrics.sample_period", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.sample_period = get_count(k, v); }},
      {"metrics.stale_norms", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.stale_norms = get_bool(k, v); }},
      {"metrics.mu_window", [](RunConfig& c, const std::string& k, const ConfigValue& v) { c.mu_window = get_count(k, v); }},
  };
  return table;
}

}  // namespace

RunConfig RunConfig::from_doc(const ConfigDoc& doc, const std::string& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  const auto& table = setters();
  for (const auto& [key, value] : doc) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown key");
    it->second(c, key, value);
  }
  c.validate();
  return c;
}

ConfigDoc RunConfig::to_doc() const {
  ConfigDoc d;
  d.emplace_back("run.id", str(run_id));
  d.emplace_back("objective.kind", str(to_string(objective)));
  d.emplace_back("objective.dim", cnt(quad_dim));
  d.emplace_back("objective.samples", cnt(quad_samples));
  d.emplace_back("objective.spectrum_lo", num(spectrum_lo));
  d.emplace_back("objective.spectrum_hi", num(spectrum_hi));
  d.emplace_back("objective.epsilon", num(epsilon));
  d.emplace_back("objective.spread", num(spread));
  d.emplace_back("objective.x0", num(x0_value));
  d.emplace_back("objective.hidden", cnt(hidden));
  d.emplace_back("data.source", str(data_source));
  d.emplace_back("data.train_images", str(train_images));
  d.emplace_back("data.train_labels", str(train_labels));
  d.emplace_back("data.test_images", str(test_images));
  d.emplace_back("data.test_labels", str(test_labels));
  d.emplace_back("data.max_rows", cnt(max_rows));
  d.emplace_back("data.classes", cnt(static_cast<std::size_t>(blob_classes)));
  d.emplace_back("data.samples", cnt(blob_samples));
  d.emplace_back("data.test_samples", cnt(blob_test_samples));
  d.emplace_back("data.features", cnt(blob_features));
  d.emplace_back("data.separation", num(blob_separation));
  d.emplace_back("variant", str(to_string(variant)));
  d.emplace_back("rho", num(rho));
  d.emplace_back("workers", cnt(workers));
  d.emplace_back("delay.model", str(to_string(delay.kind)));
  d.emplace_back("delay.variance", num(delay.delay_variance));
  d.emplace_back("delay.compute_lo", num(delay.compute_lo));
  d.emplace_back("delay.compute_hi", num(delay.compute_hi));
  d.emplace_back("delay.constant", num(delay.constant_delay));
  d.emplace_back("delay.script", str(delay.script_path));
  d.emplace_back("batch_size", cnt(batch_size));
  d.emplace_back("epochs", cnt(epochs));
  d.emplace_back("updates", cnt(updates));
  d.emplace_back("lr.schedule", str(lr_schedule));
  d.emplace_back("lr.value", num(lr));
  d.emplace_back("lr.mu", num(lr_mu));
  d.emplace_back("lr.lipschitz", num(lr_lipschitz));
  d.emplace_back("momentum", num(momentum));
  d.emplace_back("seed", cnt(static_cast<std::size_t>(seed)));
  d.emplace_back("metrics.sample_period", cnt(sample_period));
  d.emplace_back("metrics.stale_norms", flag(stale_norms));
  d.emplace_back("metrics.mu_window", cnt(mu_window));
  return d;
}

void RunConfig::validate() const {
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho", "must be in (0, 1]");
  if (batch_size < 1) throw ConfigError("batch_size", "must be >= 1");
  if (updates == 0 && epochs == 0) throw ConfigError("epochs", "update budget must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum", "must be in [0, 1)");
  if (lr_schedule != "constant" && lr_schedule != "inverse_sqrt" && lr_schedule != "horizon") {
    throw ConfigError("lr.schedule", "expected constant, inverse_sqrt or horizon");
  }
  if (lr_schedule == "constant" && !(lr > 0.0)) throw ConfigError("lr.value", "must be > 0");
  if (lr_schedule != "constant" && !(lr_mu > 0.0 && lr_mu <= 1.0)) {
    throw ConfigError("lr.mu", "must be in (0, 1]");
  }
  if (!(lr_lipschitz >= 0.0)) throw ConfigError("lr.lipschitz", "must be >= 0");
  if (objective == ObjectiveKind::kQuadratic) {
    if (quad_dim < 1) throw ConfigError("objective.dim", "must be >= 1");
    if (quad_samples < 1) throw ConfigError("objective.samples", "must be >= 1");
    if (!(spectrum_lo > 0.0 && spectrum_lo <= spectrum_hi)) {
      throw ConfigError("objective.spectrum_lo", "need 0 < spectrum_lo <= spectrum_hi");
    }
    if (!(epsilon >= 0.0)) throw ConfigError("objective.epsilon", "must be >= 0");
    if (!(spread >= 0.0)) throw ConfigError("objective.spread", "must be >= 0");
  } else {
    if (data_source != "mnist" && data_source != "blobs") {
      throw ConfigError("data.source", "expected mnist or blobs");
    }
    if (objective == ObjectiveKind::kMlp && hidden < 1) {
      throw ConfigError("objective.hidden", "must be >= 1");
    }
    if (data_source == "blobs") {
      if (blob_classes < 2) throw ConfigError("data.classes", "must be >= 2");
      if (blob_samples < 1) throw ConfigError("data.samples", "must be >= 1");
      if (blob_test_samples < 1) throw ConfigError("data.test_samples", "must be >= 1");
      if (blob_features < 1) throw ConfigError("data.features", "must be >= 1");
    }
  }
  delay.validate();
}

std::size_t RunConfig::budget(std::size_t num_samples) const {
  if (updates > 0) return updates;
  const std::size_t b = epochs * num_samples / batch_size;
  if (b == 0) throw ConfigError("epochs", "epochs * samples / batch_size rounds to 0 updates");
  return b;
}

std::string RunConfig::resolve(const std::string& path) const {
  if (path.empty() || base_dir.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

RunConfig load_run_config(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path().string();
  return RunConfig::from_doc(parse_config_file(path), dir);
}

// ---------------------------------------------------------------------------
// GridSpec

std::size_t GridSpec::cell_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

std::vector<std::pair<std::string, ConfigValue>> GridSpec::cell_values(std::size_t index) const {
  if (index >= cell_count()) throw ArgumentError("grid cell index out of range");
  std::vector<std::pair<std::string, ConfigValue>> out(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    const auto& axis = axes[a];
    out[a] = {axis.key, axis.values[index % axis.values.size()]};
    index /= axis.values.size();
  }
  return out;
}

RunConfig GridSpec::cell_config(std::size_t index, std::size_t repeat) const {
  ConfigDoc doc = base;
  for (auto& [key, value] : cell_values(index)) {
    bool replaced = false;
    for (auto& [k, v] : doc) {
      if (k == key) {
        v = value;
        replaced = true;
      }
    }
    if (!replaced) doc.emplace_back(key, value);
  }
  RunConfig c = RunConfig::from_doc(doc, base_dir);
  c.seed += repeat;
  return c;
}

GridSpec GridSpec::from_doc(const ConfigDoc& doc, const std::string& base_dir) {
  GridSpec g;
  g.base_dir = base_dir;
  for (const auto& [key, value] : doc) {
    if (key.rfind("grid.", 0) != 0) {
      g.base.emplace_back(key, value);
      continue;
    }
    const std::string sub = key.substr(5);
    if (sub == "repeats") {
      g.repeats = get_count(key, value);
      if (g.repeats < 1) throw ConfigError(key, "must be >= 1");
      continue;
    }
    const auto* arr = std::get_if<ConfigValue::Array>(&value.v);
    if (arr == nullptr) throw ConfigError(key, "grid axis must be an array");
    if (arr->empty()) throw ConfigError(key, "grid axis is empty");
    if (setters().count(sub) == 0) throw ConfigError(key, "unknown key");
    g.axes.push_back({sub, *arr});
  }
  // Every cell must be a valid config; fail before any run starts.
  for (std::size_t i = 0; i < g.cell_count(); ++i) g.cell_config(i, 0);
  return g;
}

GridSpec load_grid_spec(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path().string();
  return GridSpec::from_doc(parse_config_file(path), dir);
}

}  // namespace sasgd
