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

// ldplab: experiment runner.
//
//   ldplab <kind> [--config FILE] [--seed N] [--workers N] [--out DIR]
//   ldplab emit-plotdata FILE... [--out DIR]
//
// Exit codes: 0 ok (possibly with warnings), 2 validation, 3 numerical
// failure, 4 I/O.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldplab/config.hpp"
#include "ldplab/runner.hpp"
#include "roughldp/error.hpp"

namespace {

int exit_code(roughldp::ErrorKind k) {
  switch (k) {
    case roughldp::ErrorKind::kValidation: return 2;
    case roughldp::ErrorKind::kNumerical: return 3;
    case roughldp::ErrorKind::kIo: return 4;
  }
  return 1;
}

const char* kind_name(roughldp::ErrorKind k) {
  switch (k) {
    case roughldp::ErrorKind::kValidation: return "validation";
    case roughldp::ErrorKind::kNumerical: return "numerical";
    case roughldp::ErrorKind::kIo: return "io";
  }
  return "unknown";
}

// One JSON line on stderr, and error.json in the output directory when it exists.
int report(roughldp::ErrorKind kind, const std::string& message, const std::string& out_dir) {
  const int code = exit_code(kind);
  const nlohmann::json rec = {{"error", kind_name(kind)}, {"message", message}, {"exit_code", code}};
  std::cerr << rec.dump() << std::endl;
  if (!out_dir.empty()) {
    std::ofstream f(out_dir + "/error.json");
    if (f) f << rec.dump(2) << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large-deviation lab for pinned diffusions"};
  app.set_version_flag("--version", std::string(ldplab::version()));
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  app.add_option("--config", config_path, "INI experiment config");
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--workers", workers, "worker threads (overrides the config)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");

  std::string kind;
  for (const char* k : ldplab::kKinds) {
    app.add_subcommand(k, std::string("run the ") + k + " experiment")->fallthrough()->callback(
        [&kind, k] { kind = k; });
  }
  std::vector<std::string> inputs;
  auto* plot = app.add_subcommand("emit-plotdata", "tidy plot table from sweep/decay CSVs");
  plot->fallthrough();
  plot->add_option("files", inputs, "result CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report(roughldp::ErrorKind::kValidation, e.what(), "");
  }

  std::string record_dir;
  try {
    if (plot->parsed()) {
      ldplab::emit_plotdata(inputs, out_dir.empty() ? "." : out_dir);
      return 0;
    }
    ldplab::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ldplab::load_config(config_path);
    if (!cfg.kind.empty() && cfg.kind != kind) {
      throw roughldp::ValidationError("config kind '" + cfg.kind + "' does not match subcommand '" +
                                      kind + "'");
    }
    cfg.kind = kind;
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (!out_dir.empty()) cfg.out = out_dir;
    ldplab::validate(cfg);
    record_dir = cfg.out;
    for (const std::string& w : ldplab::run(cfg)) std::cerr << "warning: " << w << "\n";
    return 0;
  } catch (const roughldp::Error& e) {
    return report(e.kind(), e.what(), record_dir);
  } catch (const std::exception& e) {
    return report(roughldp::ErrorKind::kNumerical, e.what(), record_dir);
  }
}
