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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "roughldp/vector_fields.hpp"

namespace ldplab {

inline constexpr const char* kKinds[] = {"lift-check",      "norms",     "dyadic-decay",
                                         "skeleton",        "minimize-action",
                                         "mc-pinned",       "ldp-sweep"};

/// Fully resolved experiment settings. Every field has a default, so a
/// config file only lists what it changes.
struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out = "out";

  // [system]; params hold catalog parameters and endpoint overrides
  std::string system = "additive";
  roughldp::SystemParams params;

  // [grid]
  int n_steps = 64;
  int n_controls = 64;
  int solver_steps = 256;

  // [besov]
  double alpha = 0.42;
  int m = 4;

  // [monte_carlo]
  std::vector<double> eps_ladder{0.5, 0.35, 0.25, 0.175, 0.125};
  std::uint64_t n_mc = 100000;
  double c_eta = 0.25;
  std::uint64_t min_hits = 10;

  // [action]
  int multistarts = 4;

  // [events]: ball around the minimiser and, if high_ball, around the
  // energy-2 path g' = 1 + sqrt(6) cos(2 pi t) (1-D systems only)
  double r_min = 1.0;
  bool high_ball = false;
  double r_high = 0.15;

  // [dyadic]
  int k_lo = 2;
  int k_hi = 9;
  int dim = 1;

  // [lift_check]
  int n_paths = 1000;
  int path_steps = 16;

  // [skeleton]: control h_t = t * control (defaults to ones)
  std::vector<double> control;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// INI text -> config. Unknown sections or keys and malformed values throw
/// ValidationError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical INI text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& c);

/// Parameter gates run before any compute: known kind and system, admissible
/// Besov exponents, positive budgets and, for kinds that solve the pinned
/// problem, ellipticity of sigma at the start point.
void validate(const ExperimentConfig& c);

/// True for kinds that need sigma(a) sigma(a)^T > 0.
bool needs_ellipticity(const std::string& kind);

std::uint64_t fnv1a(std::string_view bytes);
/// fnv1a of the serialized config with the output directory blanked.
std::uint64_t config_hash(const ExperimentConfig& c);

/// Shortest of %.15g..%.17g that reads back to the same double.
std::string format_double(double x);

}  // namespace ldplab
