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

#include "roughldp/action.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "roughldp/error.hpp"
#include "roughldp/parallel.hpp"

namespace roughldp {

double ActionProblem::feasibility_tol() const {
  return feas_tol > 0.0 ? feas_tol : 1e-6 * (1.0 + a_prime.norm());
}

void ActionProblem::validate() const {
  if (a.size() != vf.n() || a_prime.size() != vf.n()) {
    throw ValidationError("ActionProblem: endpoints must have the state dimension");
  }
  if (n_controls < 1 || solver_steps < 1) {
    throw ValidationError("ActionProblem: grid sizes must be positive");
  }
  if (solver_steps % n_controls != 0) {
    throw ValidationError("ActionProblem: control grid must divide the solver grid");
  }
  if (multistarts < 0) throw ValidationError("ActionProblem: multistarts must be >= 0");
  if (!(mu0 > 0.0)) throw ValidationError("ActionProblem: mu0 must be positive");
  if (!(start_scale >= 0.0)) throw ValidationError("ActionProblem: start_scale must be >= 0");
  if (max_outer < 1) throw ValidationError("ActionProblem: max_outer must be >= 1");
}

const char* to_string(ActionStatus s) {
  switch (s) {
    case ActionStatus::kConverged:
      return "converged";
    case ActionStatus::kStalled:
      return "stalled";
    case ActionStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

namespace {

// Constraint phi^0(h)_{node_k} = target_k for a list of solver nodes, in the
// scaled variables v = h' sqrt(dt_control) so that 1/2 |v|^2 is the energy.
class Matching {
 public:
  Matching(const VectorFieldSystem& vf, Vec a, TimeGrid control, TimeGrid solver,
           std::vector<std::pair<int, Vec>> targets)
      : vf_(vf),
        a_(std::move(a)),
        control_(control),
        solver_(solver),
        ratio_(control.refinement_factor(solver)),
        scale_(std::sqrt(control.dt())),
        targets_(std::move(targets)) {}

  int n_vars() const { return control_.n_steps() * vf_.d(); }
  int n_cons() const { return static_cast<int>(targets_.size()) * vf_.n(); }
  const TimeGrid& control_grid() const { return control_; }

  CameronMartinPath control_path(const Eigen::VectorXd& v) const {
    std::vector<double> der(v.data(), v.data() + v.size());
    for (double& x : der) x /= scale_;
    return CameronMartinPath(control_, vf_.d(), std::move(der));
  }

  Eigen::VectorXd to_vars(const CameronMartinPath& h) const {
    const auto& der = h.derivatives();
    Eigen::VectorXd v(static_cast<Eigen::Index>(der.size()));
    for (std::size_t i = 0; i < der.size(); ++i) v(static_cast<Eigen::Index>(i)) = der[i] * scale_;
    return v;
  }

  SkeletonSolution solve(const Eigen::VectorXd& v, bool tangents) const {
    FlowOptions opts;
    opts.tangents = tangents;
    opts.covariance = false;
    return solve_skeleton(vf_, control_path(v).refined(solver_), a_, opts);
  }

  Eigen::VectorXd constraint(const SkeletonSolution& s) const {
    const int n = vf_.n();
    Eigen::VectorXd c(n_cons());
    for (std::size_t k = 0; k < targets_.size(); ++k) {
      c.segment(static_cast<Eigen::Index>(k) * n, n) =
          s.phi[targets_[k].first] - targets_[k].second;
    }
    return c;
  }

  // Gradient in v of w . c(v).
  Eigen::VectorXd vjp(const SkeletonSolution& s, const Eigen::VectorXd& w) const {
    const int n = vf_.n();
    const int d = vf_.d();
    std::vector<Vec> weights(static_cast<std::size_t>(solver_.n_nodes()), Vec::Zero(n));
    for (std::size_t k = 0; k < targets_.size(); ++k) {
      weights[targets_[k].first] += w.segment(static_cast<Eigen::Index>(k) * n, n);
    }
    const std::vector<double> gu = control_vjp(s, weights);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n_vars());
    for (int cell = 0; cell < solver_.n_steps(); ++cell) {
      const int ci = cell / ratio_;
      for (int q = 0; q < d; ++q) g(ci * d + q) += gu[static_cast<std::size_t>(cell) * d + q];
    }
    return g / scale_;
  }

  // Jacobian of c in v, m x N.
  Eigen::MatrixXd jacobian(const SkeletonSolution& s) const {
    Eigen::MatrixXd jac(n_cons(), n_vars());
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n_cons());
    for (int k = 0; k < n_cons(); ++k) {
      e.setZero();
      e(k) = 1.0;
      jac.row(k) = vjp(s, e).transpose();
    }
    return jac;
  }

  // min over lambda |v + J^T lambda|, with the minimising lambda.
  double stationarity(const Eigen::VectorXd& v, Eigen::VectorXd* lambda) const {
    const SkeletonSolution s = solve(v, true);
    const Eigen::MatrixXd jt = jacobian(s).transpose();
    const Eigen::VectorXd lam = jt.colPivHouseholderQr().solve(-v);
    if (lambda) *lambda = lam;
    return (v + jt * lam).norm();
  }

 private:
  const VectorFieldSystem& vf_;
  Vec a_;
  TimeGrid control_;
  TimeGrid solver_;
  int ratio_;
  double scale_;
  std::vector<std::pair<int, Vec>> targets_;
};

struct StartOutcome {
  bool ok = false;  // no numerical failure
  Eigen::VectorXd v;
  double value = kInfinity;
  double feasibility = kInfinity;
  double stationarity = kInfinity;
  Eigen::VectorXd lambda;
  std::vector<OuterStep> trace;
};

// Minimum-norm Gauss-Newton corrections v -= J^+ c, kept while they reduce
// the constraint residual.
void polish_feasibility(const Matching& m, StartOutcome& out) {
  for (int it = 0; it < 3 && out.feasibility > 0.0; ++it) {
    const SkeletonSolution s = m.solve(out.v, true);
    const Eigen::MatrixXd jac = m.jacobian(s);
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(m.constraint(s));
    if (!step.allFinite() || step.norm() == 0.0) return;
    const Eigen::VectorXd v = out.v - step;
    const double feas = m.constraint(m.solve(v, false)).norm();
    if (!(feas < out.feasibility)) return;
    out.v = v;
    out.value = 0.5 * v.squaredNorm();
    out.feasibility = feas;
  }
  Eigen::VectorXd lam;
  out.stationarity = m.stationarity(out.v, &lam);
  out.lambda = lam;
}

StartOutcome augmented_lagrangian(const Matching& m, Eigen::VectorXd v,
                                  const ActionProblem& p, double tol) {
  StartOutcome out;
  const double target = 1e-2 * tol;
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m.n_cons());
  double mu = p.mu0;
  double prev = kInfinity;
  for (int it = 0; it < p.max_outer; ++it) {
    const Objective obj = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      const SkeletonSolution s = m.solve(x, true);
      const Eigen::VectorXd c = m.constraint(s);
      g = x + m.vjp(s, lam + mu * c);
      return 0.5 * x.squaredNorm() + lam.dot(c) + 0.5 * mu * c.squaredNorm();
    };
    LbfgsOptions inner = p.inner;
    inner.grad_tol = p.inner.grad_tol * (1.0 + v.lpNorm<Eigen::Infinity>());
    const LbfgsResult r = lbfgs_minimize(obj, v, inner);
    v = r.x;
    const Eigen::VectorXd c = m.constraint(m.solve(v, false));
    const double feas = c.norm();
    Eigen::VectorXd lam_ls;
    const double stat = m.stationarity(v, &lam_ls);
    out.trace.push_back({it, 0.5 * v.squaredNorm(), feas, stat, mu, r.iterations});
    out.v = v;
    out.value = 0.5 * v.squaredNorm();
    out.feasibility = feas;
    out.stationarity = stat;
    out.lambda = lam + mu * c;
    if (feas <= target && stat <= 1e-7 * (1.0 + v.norm())) break;
    lam += mu * c;
    if (feas > 0.25 * prev) mu *= 10.0;
    prev = feas;
    if (mu > 1e16) break;
  }
  polish_feasibility(m, out);
  out.ok = true;
  return out;
}

bool lex_less(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  for (Eigen::Index i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x(i) != y(i)) return x(i) < y(i);
  }
  return x.size() < y.size();
}

struct MultiOutcome {
  std::vector<StartOutcome> starts;
  int failed = 0;
};

MultiOutcome run_multistart(const Matching& m, const ActionProblem& p, double tol) {
  const int n_starts = 1 + p.multistarts;
  MultiOutcome mo;
  mo.starts.resize(static_cast<std::size_t>(n_starts));
  parallel_for(static_cast<std::size_t>(n_starts), p.workers, [&](std::size_t s) {
    Eigen::VectorXd v0 = Eigen::VectorXd::Zero(m.n_vars());
    if (s > 0) {
      RandomStream rng(p.seed, s);
      const double sc = p.start_scale * std::sqrt(m.control_grid().dt());
      for (Eigen::Index i = 0; i < v0.size(); ++i) v0(i) = sc * rng.normal();
    }
    try {
      mo.starts[s] = augmented_lagrangian(m, v0, p, tol);
    } catch (const NumericalError&) {
      mo.starts[s] = StartOutcome{};
    }
  });
  for (const auto& s : mo.starts) {
    if (!s.ok) ++mo.failed;
  }
  return mo;
}

ActionStatus classify(const StartOutcome& s, double tol) {
  if (!(s.feasibility <= tol)) return ActionStatus::kInfeasible;
  if (s.stationarity <= 1e-6 * (1.0 + s.v.norm())) return ActionStatus::kConverged;
  return ActionStatus::kStalled;
}

}  // namespace

RateResult minimize_action(const ActionProblem& p) {
  p.validate();
  const double tol = p.feasibility_tol();
  const TimeGrid solver = p.solver_grid();
  const Matching m(p.vf, p.a, p.control_grid(), solver,
                   {{solver.n_steps(), p.a_prime}});
  const MultiOutcome mo = run_multistart(m, p, tol);

  RateResult r;
  r.seed = p.seed;
  r.feas_tol = tol;
  r.failed_starts = mo.failed;

  std::vector<int> feasible;
  for (int s = 0; s < static_cast<int>(mo.starts.size()); ++s) {
    if (mo.starts[s].ok && mo.starts[s].feasibility <= tol) feasible.push_back(s);
  }
  const auto order = [&](int x, int y) {
    const auto& a = mo.starts[x];
    const auto& b = mo.starts[y];
    if (a.value != b.value) return a.value < b.value;
    return lex_less(a.v, b.v);
  };
  if (feasible.empty()) {
    int best = -1;
    for (int s = 0; s < static_cast<int>(mo.starts.size()); ++s) {
      if (!mo.starts[s].ok) continue;
      if (best < 0 || mo.starts[s].feasibility < mo.starts[best].feasibility) best = s;
    }
    r.status = ActionStatus::kInfeasible;
    r.message = "no start reached the endpoint a' within tolerance: the "
                "target is not reachable by any control found";
    if (best >= 0) {
      const auto& s = mo.starts[best];
      r.best_start = best;
      r.h = m.control_path(s.v);
      r.residual = s.feasibility;
      r.stationarity = s.stationarity;
      r.trace = s.trace;
    }
    return r;
  }
  std::sort(feasible.begin(), feasible.end(), order);
  const StartOutcome& best = mo.starts[feasible.front()];
  r.status = classify(best, tol);
  r.best_start = feasible.front();
  r.h = m.control_path(best.v);
  r.value = best.value;
  r.residual = best.feasibility;
  r.stationarity = best.stationarity;
  r.multiplier = Vec(best.lambda.size());
  for (Eigen::Index i = 0; i < best.lambda.size(); ++i) r.multiplier(i) = best.lambda(i);
  r.trace = best.trace;
  r.message = r.status == ActionStatus::kConverged
                  ? "converged"
                  : "feasible but the first-order residual did not reach tolerance";

  std::vector<const StartOutcome*> kept;
  for (int s : feasible) {
    const StartOutcome& c = mo.starts[s];
    if (c.value > best.value + 1e-4) break;
    bool duplicate = false;
    for (const StartOutcome* k : kept) {
      if ((k->v - c.v).lpNorm<Eigen::Infinity>() <=
          1e-3 * (1.0 + k->v.lpNorm<Eigen::Infinity>())) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    kept.push_back(&c);
    r.minima.push_back({m.control_path(c.v), c.value, c.feasibility, s});
  }
  return r;
}

double first_order_residual(const CameronMartinPath& h, const ActionProblem& p) {
  p.validate();
  const TimeGrid solver = p.solver_grid();
  const Matching m(p.vf, p.a, h.grid(), solver, {{solver.n_steps(), p.a_prime}});
  return m.stationarity(m.to_vars(h), nullptr);
}

double first_order_residual(const RateResult& r, const ActionProblem& p) {
  if (r.status == ActionStatus::kInfeasible) {
    throw ValidationError("first_order_residual: result is not feasible");
  }
  return first_order_residual(r.h, p);
}

double rate_I(const Level2RoughPath& x, const ActionProblem& p) {
  p.validate();
  if (x.dim() != p.vf.d()) throw ValidationError("rate_I: driver dimension mismatch");
  const int d = x.dim();
  const auto& c1 = x.first_cells();
  const auto& c2 = x.second_cells();
  const double dt = x.grid().dt();
  std::vector<double> der(c1.size());
  for (int i = 0; i < x.grid().n_steps(); ++i) {
    const double* a1 = c1.data() + static_cast<std::size_t>(i) * d;
    const double* a2 = c2.data() + static_cast<std::size_t>(i) * d * d;
    double size = 0.0;
    for (int j = 0; j < d; ++j) size += a1[j] * a1[j];
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        if (std::abs(a2[j * d + k] - 0.5 * a1[j] * a1[k]) > 1e-12 * (1.0 + size)) {
          return kInfinity;
        }
      }
      der[static_cast<std::size_t>(i) * d + j] = a1[j] / dt;
    }
  }
  const CameronMartinPath h(x.grid(), d, std::move(der));
  const TimeGrid g = x.grid().common_refinement(p.solver_grid());
  const Vec end = skeleton_endpoint(p.vf, h.refined(g), p.a);
  if (!((end - p.a_prime).norm() <= p.feasibility_tol())) return kInfinity;
  return h.energy();
}

double rate_I_hat(const Level2RoughPath& x, const ActionProblem& p,
                  const RateResult& best) {
  const double v = rate_I(x, p);
  return v == kInfinity ? kInfinity : best.shifted(v);
}

PathRate rate_J(const SampledPath& y, const ActionProblem& p, const RateResult& best) {
  p.validate();
  if (y.dim() != p.vf.n()) throw ValidationError("rate_J: path must live in the state space");
  const TimeGrid solver = p.solver_grid();
  const int ratio = y.grid().refinement_factor(solver);
  const double tol = p.feasibility_tol();
  PathRate out;
  const int last = y.grid().n_steps();
  out.endpoint_ok = (y.point(0) - p.a).norm() <= 1e-12 * (1.0 + p.a.norm()) &&
                    (y.point(last) - p.a_prime).norm() <= tol;
  if (!out.endpoint_ok) return out;

  std::vector<std::pair<int, Vec>> targets;
  for (int i = 1; i <= last; ++i) {
    const Eigen::VectorXd pt = y.point(i);
    targets.emplace_back(i * ratio, Vec(pt));
  }
  const Matching m(p.vf, p.a, y.grid(), solver, std::move(targets));
  const MultiOutcome mo = run_multistart(m, p, tol);
  int chosen = -1;
  for (int s = 0; s < static_cast<int>(mo.starts.size()); ++s) {
    const auto& c = mo.starts[s];
    if (!c.ok) continue;
    if (chosen < 0) {
      chosen = s;
      continue;
    }
    const auto& b = mo.starts[chosen];
    const bool c_ok = c.feasibility <= tol;
    const bool b_ok = b.feasibility <= tol;
    if (c_ok != b_ok ? c_ok
                     : (c_ok ? (c.value < b.value ||
                                (c.value == b.value && lex_less(c.v, b.v)))
                             : c.feasibility < b.feasibility)) {
      chosen = s;
    }
  }
  if (chosen < 0) return out;
  const StartOutcome& c = mo.starts[chosen];
  out.mismatch = c.feasibility;
  out.h = m.control_path(c.v);
  out.status = classify(c, tol);
  out.matched = c.feasibility <= tol;
  if (!out.matched) return out;
  out.energy = c.value;
  out.value = best.value == kInfinity ? kInfinity : c.value - best.value;
  return out;
}

}  // namespace roughldp
