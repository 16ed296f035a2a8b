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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "roughldp/flow.hpp"
#include "roughldp/lbfgs.hpp"
#include "roughldp/rough_core.hpp"
#include "roughldp/vector_fields.hpp"

namespace roughldp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// min 1/2 ||h||_H^2 subject to phi^0(h)_1 = a', over controls piecewise
/// constant on n_controls cells; the skeleton is integrated on solver_steps
/// cells (a multiple of n_controls).
struct ActionProblem {
  VectorFieldSystem vf;
  Vec a;
  Vec a_prime;
  int n_controls = 64;
  int solver_steps = 256;
  int multistarts = 4;        // random starts besides the zero control
  double start_scale = 1.0;   // std of random start derivatives
  std::uint64_t seed = 0;
  double feas_tol = 0.0;      // <= 0 selects 1e-6 (1 + |a'|)
  double mu0 = 10.0;
  int max_outer = 40;
  int workers = 1;
  LbfgsOptions inner{10, 2000, 1e-10, 1e-15, 50};

  ActionProblem(VectorFieldSystem system, Vec start, Vec target)
      : vf(std::move(system)), a(std::move(start)), a_prime(std::move(target)) {}

  TimeGrid control_grid() const { return TimeGrid(n_controls); }
  TimeGrid solver_grid() const { return TimeGrid(solver_steps); }
  double feasibility_tol() const;
  /// Throws ValidationError on inconsistent sizes, grids or tolerances.
  void validate() const;
};

enum class ActionStatus { kConverged, kStalled, kInfeasible };

const char* to_string(ActionStatus s);

struct OuterStep {
  int iteration;
  double value;          // 1/2 ||h||^2
  double feasibility;    // constraint residual
  double stationarity;   // min over multipliers of the Lagrangian gradient
  double mu;
  int inner_iterations;
  /// max(stationarity, feasibility): the first-order residual of the
  /// constrained problem.
  double first_order() const { return std::max(stationarity, feasibility); }
};

struct LocalMinimum {
  CameronMartinPath h;
  double value;
  double residual;
  int start_index;
};

struct RateResult {
  ActionStatus status = ActionStatus::kInfeasible;
  CameronMartinPath h{TimeGrid(1), 1, {0.0}};  // minimiser on the control grid
  double value = kInfinity;      // +infinity unless feasible
  double residual = kInfinity;
  double stationarity = kInfinity;
  Vec multiplier;
  /// Minima within 1e-4 of the best, ordered by value then controls.
  std::vector<LocalMinimum> minima;
  std::vector<OuterStep> trace;  // of the best start
  int best_start = -1;
  int failed_starts = 0;
  std::uint64_t seed = 0;
  double feas_tol = 0.0;
  std::string message;

  /// I_hat = I - min I for a value of I.
  double shifted(double rate) const { return rate - value; }
};

/// Augmented Lagrangian over the endpoint constraint with an L-BFGS inner
/// solver and multistart. Starts that never reach feasibility give status
/// kInfeasible (the starting point cannot be steered to a').
RateResult minimize_action(const ActionProblem& p);

/// min over lambda of || h' + sigma^T M_s^{-T} M_1^T lambda ||_{L^2}, using
/// the discrete adjoint of the solver.
double first_order_residual(const RateResult& r, const ActionProblem& p);
double first_order_residual(const CameronMartinPath& h, const ActionProblem& p);

/// I(X): 1/2 ||h||^2 when X is the lift of a piecewise-linear h whose
/// skeleton ends within the feasibility tolerance of a', +infinity otherwise.
double rate_I(const Level2RoughPath& x, const ActionProblem& p);
double rate_I_hat(const Level2RoughPath& x, const ActionProblem& p,
                  const RateResult& best);

struct PathRate {
  double value = kInfinity;  // J(y); +infinity when no matching h was found
  double energy = kInfinity; // inf 1/2 ||h||^2 over matching h
  bool endpoint_ok = false;  // y_0 = a and y_1 within tolerance of a'
  bool matched = false;      // path-matching constraint met
  ActionStatus status = ActionStatus::kInfeasible;
  double mismatch = kInfinity;  // sqrt(sum_i |phi_{t_i} - y_{t_i}|^2)
  CameronMartinPath h{TimeGrid(1), 1, {0.0}};
};

/// J(y): minimal energy over controls on the grid of y whose skeleton
/// passes through every node of y, minus best.value. The skeleton is solved
/// on p's solver grid, which must refine the grid of y.
PathRate rate_J(const SampledPath& y, const ActionProblem& p, const RateResult& best);

}  // namespace roughldp
