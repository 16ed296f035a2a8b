/*
 * Copyright 2026 The roughldp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ldplab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "roughldp/error.hpp"
#include "roughldp/norms.hpp"

namespace pt = boost::property_tree;
using roughldp::ValidationError;

namespace ldplab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("config: bad value for " + key + ": '" + raw + "'");
  }
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, item));
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ValidationError("config: bad value for " + key + ": '" + raw + "'");
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

// section -> key -> setter
struct Binder {
  ExperimentConfig& c;

  void apply(const std::string& section, const std::string& key, const std::string& v) {
    const std::string name = section + "." + key;
    if (section == "experiment") {
      if (key == "kind") return void(c.kind = trim(v));
      if (key == "seed") return void(c.seed = parse_number<std::uint64_t>(name, v));
      if (key == "workers") return void(c.workers = parse_number<int>(name, v));
      if (key == "out") return void(c.out = trim(v));
    } else if (section == "system") {
      if (key == "name") return void(c.system = trim(v));
      c.params[key] = parse_number<double>(name, v);
      return;
    } else if (section == "grid") {
      if (key == "n_steps") return void(c.n_steps = parse_number<int>(name, v));
      if (key == "n_controls") return void(c.n_controls = parse_number<int>(name, v));
      if (key == "solver_steps") return void(c.solver_steps = parse_number<int>(name, v));
    } else if (section == "besov") {
      if (key == "alpha") return void(c.alpha = parse_number<double>(name, v));
      if (key == "m") return void(c.m = parse_number<int>(name, v));
    } else if (section == "monte_carlo") {
      if (key == "eps_ladder") return void(c.eps_ladder = parse_list(name, v));
      if (key == "n_mc") return void(c.n_mc = parse_number<std::uint64_t>(name, v));
      if (key == "c_eta") return void(c.c_eta = parse_number<double>(name, v));
      if (key == "min_hits") return void(c.min_hits = parse_number<std::uint64_t>(name, v));
    } else if (section == "action") {
      if (key == "multistarts") return void(c.multistarts = parse_number<int>(name, v));
    } else if (section == "events") {
      if (key == "r_min") return void(c.r_min = parse_number<double>(name, v));
      if (key == "high_ball") return void(c.high_ball = parse_bool(name, v));
      if (key == "r_high") return void(c.r_high = parse_number<double>(name, v));
    } else if (section == "dyadic") {
      if (key == "k_lo") return void(c.k_lo = parse_number<int>(name, v));
      if (key == "k_hi") return void(c.k_hi = parse_number<int>(name, v));
      if (key == "dim") return void(c.dim = parse_number<int>(name, v));
    } else if (section == "lift_check") {
      if (key == "n_paths") return void(c.n_paths = parse_number<int>(name, v));
      if (key == "path_steps") return void(c.path_steps = parse_number<int>(name, v));
    } else if (section == "skeleton") {
      if (key == "control") return void(c.control = parse_list(name, v));
    } else {
      throw ValidationError("config: unknown section [" + section + "]");
    }
    throw ValidationError("config: unknown key " + name);
  }
};

}  // namespace

std::string format_double(double x) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x || std::isnan(x)) break;
  }
  return buf;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  ExperimentConfig copy = c;
  copy.out.clear();
  return fnv1a(serialize_config(copy));
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  Binder b{c};
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ValidationError("config: key outside a section: " + section);
    for (const auto& [key, value] : body) b.apply(section, key, value.data());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw roughldp::IoError("cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  pt::ptree t;
  t.put("experiment.kind", c.kind);
  t.put("experiment.seed", std::to_string(c.seed));
  t.put("experiment.workers", std::to_string(c.workers));
  t.put("experiment.out", c.out);
  t.put("system.name", c.system);
  for (const auto& [k, v] : c.params) t.put(pt::ptree::path_type("system." + k, '.'), format_double(v));
  t.put("grid.n_steps", std::to_string(c.n_steps));
  t.put("grid.n_controls", std::to_string(c.n_controls));
  t.put("grid.solver_steps", std::to_string(c.solver_steps));
  t.put("besov.alpha", format_double(c.alpha));
  t.put("besov.m", std::to_string(c.m));
  t.put("monte_carlo.eps_ladder", join(c.eps_ladder));
  t.put("monte_carlo.n_mc", std::to_string(c.n_mc));
  t.put("monte_carlo.c_eta", format_double(c.c_eta));
  t.put("monte_carlo.min_hits", std::to_string(c.min_hits));
  t.put("action.multistarts", std::to_string(c.multistarts));
  t.put("events.r_min", format_double(c.r_min));
  t.put("events.high_ball", c.high_ball ? "true" : "false");
  t.put("events.r_high", format_double(c.r_high));
  t.put("dyadic.k_lo", std::to_string(c.k_lo));
  t.put("dyadic.k_hi", std::to_string(c.k_hi));
  t.put("dyadic.dim", std::to_string(c.dim));
  t.put("lift_check.n_paths", std::to_string(c.n_paths));
  t.put("lift_check.path_steps", std::to_string(c.path_steps));
  if (!c.control.empty()) t.put("skeleton.control", join(c.control));
  std::ostringstream out;
  pt::write_ini(out, t);
  return out.str();
}

bool needs_ellipticity(const std::string& kind) {
  return kind == "skeleton" || kind == "minimize-action" || kind == "mc-pinned" ||
         kind == "ldp-sweep";
}

void validate(const ExperimentConfig& c) {
  if (std::none_of(std::begin(kKinds), std::end(kKinds),
                   [&](const char* k) { return c.kind == k; })) {
    throw ValidationError("unknown experiment kind '" + c.kind + "'");
  }
  if (c.workers < 1) throw ValidationError("workers must be >= 1");
  if (c.out.empty()) throw ValidationError("output directory must be set");
  if (c.n_steps < 1 || c.n_controls < 1 || c.solver_steps < 1) {
    throw ValidationError("grid sizes must be positive");
  }
  if (c.n_mc < 1 || c.n_paths < 1 || c.path_steps < 2 || c.multistarts < 0) {
    throw ValidationError("budgets must be positive");
  }
  if (c.eps_ladder.empty()) throw ValidationError("empty eps ladder");
  for (double e : c.eps_ladder) {
    if (!(e > 0.0)) throw ValidationError("eps values must be positive");
  }
  if (!(c.c_eta > 0.0)) throw ValidationError("c_eta must be positive");
  if (!(c.r_min > 0.0) || !(c.r_high > 0.0)) throw ValidationError("ball radii must be positive");
  if (c.dim < 1 || c.dim > roughldp::kMaxDim) throw ValidationError("dim out of range");

  const bool uses_besov = c.kind == "norms" || c.kind == "dyadic-decay" ||
                          c.kind == "mc-pinned" || c.kind == "ldp-sweep";
  if (uses_besov) roughldp::BesovParams(c.alpha, c.m);

  if (c.kind == "lift-check" || c.kind == "norms" || c.kind == "dyadic-decay") return;
  const roughldp::CatalogSystem sys = roughldp::make_system(c.system, c.params);
  if (needs_ellipticity(c.kind)) sys.system.require_elliptic(sys.a);
  if (c.kind == "skeleton" && !c.control.empty() &&
      static_cast<int>(c.control.size()) != sys.system.d()) {
    throw ValidationError("skeleton.control must have one entry per driver");
  }
  if (c.high_ball && sys.system.d() != 1) {
    throw ValidationError("events.high_ball needs a one-dimensional driver");
  }
}

}  // namespace ldplab
