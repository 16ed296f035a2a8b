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

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace roughldp {

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 500;
  double grad_tol = 1e-10;   // on the max-norm of the gradient
  double rel_f_tol = 1e-15;  // relative decrease below this counts as stalled
  int max_backtracks = 50;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// f(x, grad) returns the objective and writes its gradient.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with Armijo backtracking.
LbfgsResult lbfgs_minimize(const Objective& f, Eigen::VectorXd x0,
                           const LbfgsOptions& opts = {});

}  // namespace roughldp
