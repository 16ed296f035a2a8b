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

#include <string>
#include <vector>

#include "ldplab/config.hpp"
#include "roughldp/rough_core.hpp"

namespace ldplab {

/// Code version written into manifests.
const char* version();

/// Runs the experiment, writes its outputs and manifest.json into c.out and
/// returns the warnings. Failed acceptance-level checks (a property suite
/// that does not pass, an infeasible action problem) throw NumericalError
/// after the outputs are written.
std::vector<std::string> run(const ExperimentConfig& c);

/// Long-format plot table (x, y, series, stderr) from sweep and decay CSVs,
/// written to out_dir/plotdata.csv. Files with an unknown header throw
/// ValidationError; empty files contribute nothing.
void emit_plotdata(const std::vector<std::string>& inputs, const std::string& out_dir);

/// Energy-2 test path g' = 1 + sqrt(6) cos(2 pi t), cell-averaged; ends at 1.
roughldp::CameronMartinPath high_energy_path(int n_steps);

}  // namespace ldplab
