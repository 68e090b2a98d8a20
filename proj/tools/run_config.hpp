// Copyright 2026 The lindground Authors
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

// Run configuration schema, parsing and default resolution for the CLI.

#pragma once

#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lindground/circuit.hpp"

namespace lindground::cli {

using json = nlohmann::ordered_json;

/// A schema or syntax problem, located at a line of the config file when the
/// line can be determined (0 otherwise).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line) : std::runtime_error(msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct FilterOverrides {
  std::optional<double> norm;
  std::optional<double> gap;
  std::optional<double> a;
  std::optional<double> delta_a;
  std::optional<double> b;
  std::optional<double> delta_b;
  std::optional<double> S_s;
  std::optional<double> tau_s;
  bool clamp = false;
};

struct OutputSpec {
  std::string csv;
  std::string manifest;
  bool plots = true;
  std::string plot_prefix;
};

struct RunConfig {
  std::string name;
  std::string description;
  ModelSpec model;
  FilterOverrides filter;
  ChannelConfig channel;
  OutputSpec output;
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  int line = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

/// Best-effort line lookup for a key path: each key is searched for as a
/// quoted string after the position of its parent.
inline int line_of_path(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const auto& key : path) {
    const std::size_t found = text.find("\"" + key + "\"", pos);
    if (found == std::string::npos) return 0;
    pos = found + 1;
  }
  return path.empty() ? 0 : line_of_offset(text, pos);
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    std::string where;
    for (const auto& p : path) where += (where.empty() ? "" : ".") + p;
    throw ConfigError((where.empty() ? "" : where + ": ") + msg, line_of_path(text_, path));
  }

  void check_keys(const json& obj, const std::vector<std::string>& path, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) {
        auto p = path;
        p.push_back(it.key());
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(p, "unknown key \"" + it.key() + "\" (allowed: " + list + ")");
      }
    }
  }

  const json* find(const json& obj, const std::string& key) const {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  const json& require(const json& obj, const std::vector<std::string>& path, const std::string& key) const {
    const json* v = find(obj, key);
    if (!v) fail(path, "missing required key \"" + key + "\"");
    return *v;
  }

  double number(const json& v, std::vector<std::string> path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
  }

  long long integer(const json& v, std::vector<std::string> path) const {
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path, "expected an integer");
    return v.get<long long>();
  }

  bool boolean(const json& v, std::vector<std::string> path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, std::vector<std::string> path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::optional<double> opt_number(const json& obj, const std::vector<std::string>& path, const std::string& key,
                                   bool positive = true) const {
    const json* v = find(obj, key);
    if (!v) return std::nullopt;
    auto p = path;
    p.push_back(key);
    const double d = number(*v, p);
    if (positive && !(d > 0.0)) fail(p, "must be positive");
    return d;
  }

 private:
  const std::string& text_;
};

}  // namespace detail

inline ModelSpec parse_model(const detail::Reader& r, const json& m) {
  const std::vector<std::string> path{"model"};
  if (!m.is_object()) r.fail(path, "expected an object");
  const std::string kind = r.string(r.require(m, path, "kind"), {"model", "kind"});
  ModelSpec spec;
  const long long sites = r.integer(r.require(m, path, "sites"), {"model", "sites"});
  try {
    if (kind == "tfim") {
      r.check_keys(m, path, {"kind", "sites", "g"});
      spec = ModelSpec::tfim(static_cast<int>(sites), r.number(r.require(m, path, "g"), {"model", "g"}));
    } else if (kind == "hubbard1d") {
      r.check_keys(m, path, {"kind", "sites", "t", "U"});
      spec = ModelSpec::hubbard(static_cast<int>(sites), r.number(r.require(m, path, "t"), {"model", "t"}),
                                r.number(r.require(m, path, "U"), {"model", "U"}));
    } else {
      r.fail({"model", "kind"}, "unknown model kind \"" + kind + "\" (expected tfim or hubbard1d)");
    }
    spec.validate();
  } catch (const ContractViolation& e) {
    r.fail({"model", "sites"}, e.what());
  }
  return spec;
}

inline FilterOverrides parse_filter(const detail::Reader& r, const json* f) {
  FilterOverrides o;
  if (!f) return o;
  const std::vector<std::string> path{"filter"};
  r.check_keys(*f, path, {"norm", "gap", "a", "delta_a", "b", "delta_b", "S_s", "tau_s", "clamp"});
  o.norm = r.opt_number(*f, path, "norm");
  o.gap = r.opt_number(*f, path, "gap");
  o.a = r.opt_number(*f, path, "a");
  o.delta_a = r.opt_number(*f, path, "delta_a");
  o.b = r.opt_number(*f, path, "b");
  o.delta_b = r.opt_number(*f, path, "delta_b");
  o.S_s = r.opt_number(*f, path, "S_s");
  o.tau_s = r.opt_number(*f, path, "tau_s");
  if (const json* c = r.find(*f, "clamp")) o.clamp = r.boolean(*c, {"filter", "clamp"});
  return o;
}

inline ChannelConfig parse_channel(const detail::Reader& r, const json& c) {
  const std::vector<std::string> path{"channel"};
  r.check_keys(c, path,
               {"mode", "tau", "segments", "include_coherent", "total_time", "backend", "reps", "seed",
                "record_stride"});
  ChannelConfig cfg;
  const std::string mode = r.string(r.require(c, path, "mode"), {"channel", "mode"});
  if (mode == "continuous") {
    cfg.mode = ChannelMode::continuous;
  } else if (mode == "discrete") {
    cfg.mode = ChannelMode::discrete;
  } else {
    r.fail({"channel", "mode"}, "expected \"continuous\" or \"discrete\"");
  }
  cfg.tau = r.number(r.require(c, path, "tau"), {"channel", "tau"});
  cfg.total_time = r.number(r.require(c, path, "total_time"), {"channel", "total_time"});
  if (const json* v = r.find(c, "segments")) cfg.segments = static_cast<int>(r.integer(*v, {"channel", "segments"}));
  if (const json* v = r.find(c, "include_coherent")) cfg.include_coherent = r.boolean(*v, {"channel", "include_coherent"});
  if (const json* v = r.find(c, "backend")) {
    const std::string b = r.string(*v, {"channel", "backend"});
    if (b == "density") {
      cfg.backend = Backend::density;
    } else if (b == "trajectory") {
      cfg.backend = Backend::trajectory;
    } else {
      r.fail({"channel", "backend"}, "expected \"density\" or \"trajectory\"");
    }
  }
  if (const json* v = r.find(c, "reps")) cfg.reps = static_cast<int>(r.integer(*v, {"channel", "reps"}));
  if (const json* v = r.find(c, "seed")) {
    const long long s = r.integer(*v, {"channel", "seed"});
    if (s < 0) r.fail({"channel", "seed"}, "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (const json* v = r.find(c, "record_stride")) {
    cfg.record_stride = static_cast<int>(r.integer(*v, {"channel", "record_stride"}));
  }
  try {
    cfg.validate();
  } catch (const ContractViolation& e) {
    r.fail({"channel"}, e.what());
  }
  return cfg;
}

inline OutputSpec parse_output(const detail::Reader& r, const json* o, const std::string& name) {
  OutputSpec out{name + ".csv", name + ".manifest.json", true, name};
  if (!o) return out;
  const std::vector<std::string> path{"output"};
  r.check_keys(*o, path, {"csv", "manifest", "plots", "plot_prefix"});
  if (const json* v = r.find(*o, "csv")) out.csv = r.string(*v, {"output", "csv"});
  if (const json* v = r.find(*o, "manifest")) out.manifest = r.string(*v, {"output", "manifest"});
  if (const json* v = r.find(*o, "plots")) out.plots = r.boolean(*v, {"output", "plots"});
  if (const json* v = r.find(*o, "plot_prefix")) out.plot_prefix = r.string(*v, {"output", "plot_prefix"});
  return out;
}

/// Parses and schema-checks a config document. `default_name` names the run
/// when the document has no "name" key.
inline RunConfig parse_config_text(const std::string& text, const std::string& default_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), detail::line_of_offset(text, e.byte));
  }
  const detail::Reader r(text);
  r.check_keys(doc, {}, {"name", "description", "model", "filter", "channel", "output"});
  RunConfig cfg;
  cfg.name = default_name;
  if (const json* v = r.find(doc, "name")) cfg.name = r.string(*v, {"name"});
  if (const json* v = r.find(doc, "description")) cfg.description = r.string(*v, {"description"});
  cfg.model = parse_model(r, r.require(doc, {}, "model"));
  cfg.filter = parse_filter(r, r.find(doc, "filter"));
  cfg.channel = parse_channel(r, r.require(doc, {}, "channel"));
  cfg.output = parse_output(r, r.find(doc, "output"), cfg.name);
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), file.stem().string());
}

/// The filter rule evaluated at the instance's norm and gap, with explicit
/// overrides applied field by field. tau_s follows an overridden a unless it
/// is itself overridden.
inline FilterParams resolve_filter(const FilterOverrides& o, const SpectralDecomposition& spec) {
  const double norm = o.norm.value_or(spec.norm());
  const double gap = o.gap.value_or(spec.gap);
  const bool need_gap = !(o.b && o.delta_b && o.S_s);
  if (need_gap && !(gap > 1e-12 * std::max(1.0, norm))) {
    throw ContractViolation(
        "the Hamiltonian has a zero spectral gap; set filter.gap or explicit filter.b, filter.delta_b and "
        "filter.S_s");
  }
  const double a = o.a.value_or(2.5 * norm);
  const double da = o.delta_a.value_or(0.5 * norm);
  const double b = o.b.value_or(gap);
  const double db = o.delta_b.value_or(gap);
  const double S = o.S_s.value_or(5.0 / gap);
  const double tau_s = o.tau_s.value_or(std::numbers::pi / (2.0 * a));
  return FilterParams::make(a, da, b, db, S, tau_s, o.clamp);
}

inline json filter_json(const FilterParams& p) {
  json j;
  j["a"] = p.a;
  j["delta_a"] = p.delta_a;
  j["b"] = p.b;
  j["delta_b"] = p.delta_b;
  j["S_s"] = p.S_s;
  j["tau_s"] = p.tau_s;
  j["M_s"] = p.M_s;
  j["effective_radius"] = p.effective_radius();
  j["clamp"] = p.clamp_nonnegative;
  return j;
}

inline json model_json(const ModelSpec& m) {
  json j;
  j["kind"] = to_string(m.kind);
  j["sites"] = m.sites;
  if (m.kind == ModelKind::tfim) {
    j["g"] = m.tfim_g;
    j["coupling"] = "Z on site 0";
  } else {
    j["t"] = m.hubbard_t;
    j["U"] = m.hubbard_U;
    j["coupling"] = "spin-summed hopping on bond (0,1)";
  }
  j["qubits"] = m.qubit_count();
  return j;
}

inline json channel_json(const ChannelConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["tau"] = c.tau;
  j["segments"] = c.segments;
  j["tau_eff"] = c.tau_eff();
  j["include_coherent"] = c.include_coherent;
  j["total_time"] = c.total_time;
  j["steps"] = c.step_count();
  j["backend"] = to_string(c.backend);
  j["reps"] = c.reps;
  j["effective_reps"] = c.backend == Backend::density ? 1 : c.reps;
  j["seed"] = c.seed;
  j["record_stride"] = c.record_stride;
  j["initial_state"] = "highest excited eigenstate";
  return j;
}

}  // namespace lindground::cli
