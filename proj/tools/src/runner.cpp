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

#include "ldplab/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "roughldp/action.hpp"
#include "roughldp/dyadic.hpp"
#include "roughldp/error.hpp"
#include "roughldp/flow.hpp"
#include "roughldp/montecarlo.hpp"
#include "roughldp/norms.hpp"
#include "roughldp/parallel.hpp"
#include "roughldp/rough_core.hpp"

#ifndef LDPLAB_VERSION
#define LDPLAB_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace roughldp;

namespace ldplab {

namespace {

constexpr double kIdentityTol = 1e-12;

const char* kMollifierNote =
    "the endpoint delta is replaced by a Gaussian kernel of bandwidth c_eta * eps "
    "centred at a'; at large-deviation scale this adds |y_1 - a'|^2 / (2 c_eta^2) "
    "to the rate, so fitted rates over-estimate the pinned rate";

struct Output {
  fs::path dir;
  std::vector<std::string> warnings;
  json summary;

  void write(const std::string& name, const std::string& body) const {
    std::ofstream f(dir / name, std::ios::binary);
    f << body;
    if (!f) throw IoError("cannot write " + (dir / name).string());
  }
  void write_json(const std::string& name, const json& j) const { write(name, j.dump(2) + "\n"); }
};

std::string num(double x) { return format_double(x); }

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_json(const Mat& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

json estimate_json(const Estimate& e) {
  return {{"value", e.value},     {"stderr", e.stderr_}, {"log_value", e.log_value},
          {"ess", e.ess},         {"n", e.n},            {"hits", e.hits},
          {"blowups", e.blowups}};
}

void estimate_warnings(Output& out, const std::string& where, const Estimate& e) {
  if (e.zero()) out.warnings.push_back(where + ": no sample hit the event");
  else if (e.low_ess()) out.warnings.push_back(where + ": effective sample size " + num(e.ess));
  if (e.blowups > 0) {
    out.warnings.push_back(where + ": blow-up fraction " + num(e.blowup_fraction()));
  }
}

SampledPath brownian_polygon(int n, int d, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<double> v(static_cast<std::size_t>(n + 1) * d, 0.0);
  const double sd = std::sqrt(1.0 / n);
  for (int i = 1; i <= n; ++i) {
    for (int k = 0; k < d; ++k) v[i * d + k] = v[(i - 1) * d + k] + sd * rng.normal();
  }
  return SampledPath(TimeGrid(n), d, std::move(v));
}

double group_gap(const GroupElement& a, const GroupElement& b) {
  return std::max((a.a1 - b.a1).lpNorm<Eigen::Infinity>(), (a.a2 - b.a2).lpNorm<Eigen::Infinity>());
}

ActionProblem make_problem(const ExperimentConfig& c) {
  CatalogSystem sys = make_system(c.system, c.params);
  ActionProblem p(std::move(sys.system), sys.a, sys.a_prime);
  p.n_controls = c.n_controls;
  p.solver_steps = c.solver_steps;
  p.multistarts = c.multistarts;
  p.seed = c.seed;
  p.workers = c.workers;
  return p;
}

RateResult solve_action(const ActionProblem& p) {
  RateResult r = minimize_action(p);
  if (r.status == ActionStatus::kInfeasible) {
    throw NumericalError("action minimisation found no feasible control: " + r.message);
  }
  return r;
}

void run_lift_check(const ExperimentConfig& c, Output& out) {
  const int n = c.path_steps;
  const int mid1 = n / 3, mid2 = (2 * n) / 3;
  double chen = 0, shuffle = 0, group = 0, translation = 0, jalg = 0;
  for (int d = 1; d <= 3; ++d) {
    for (int s = 0; s < c.n_paths; ++s) {
      const std::uint64_t seed = mix_seed(c.seed, static_cast<std::uint64_t>(d) << 32 | s);
      const SampledPath w = brownian_polygon(n, d, seed);
      const Level2RoughPath x = lift_piecewise_linear(w);
      chen = std::max(chen, max_chen_defect(x));
      shuffle = std::max(shuffle, geometric_defect(x));
      const GroupElement p = x.increment(0, mid1), q = x.increment(mid1, mid2),
                         r = x.increment(mid2, n);
      const GroupElement e = GroupElement::identity(d);
      group = std::max({group, group_gap(chen_compose(p, e), p), group_gap(chen_compose(e, p), p),
                        group_gap(chen_compose(p, p.inverse()), e),
                        group_gap(chen_compose(chen_compose(p, q), r),
                                  chen_compose(p, chen_compose(q, r)))});
      RandomStream rng(seed, 1);
      std::vector<double> der(static_cast<std::size_t>(n) * d);
      for (double& v : der) v = rng.normal();
      const CameronMartinPath h(TimeGrid(n), d, std::move(der));
      const Level2RoughPath th = young_translate(x, h);
      const Level2RoughPath direct = lift_piecewise_linear(w + h.path());
      for (int i = 0; i <= n; ++i) {
        for (int j = i; j <= n; ++j) {
          translation = std::max(translation, group_gap(th.increment(i, j), direct.increment(i, j)));
        }
      }
      jalg = std::max(jalg, level2_decomposition_residual(brownian_polygon(n, d, seed + 1), w));
    }
  }
  json props = json::array();
  bool all = true;
  for (auto [name, v] : {std::pair<const char*, double>{"chen", chen},
                         {"shuffle", shuffle},
                         {"group_axioms", group},
                         {"translation", translation},
                         {"level2_decomposition", jalg}}) {
    const bool ok = v < kIdentityTol;
    all = all && ok;
    props.push_back({{"property", name}, {"max_defect", v}, {"tolerance", kIdentityTol}, {"pass", ok}});
  }
  out.summary = {{"paths_per_dim", c.n_paths}, {"dims", {1, 2, 3}}, {"properties", props},
                 {"all_pass", all}};
  out.write_json("lift_check.json", out.summary);
  if (!all) throw NumericalError("lift-check: an identity exceeded its tolerance");
}

void run_norms(const ExperimentConfig& c, Output& out) {
  const BesovParams p(c.alpha, c.m);
  std::ostringstream csv;
  csv << "case,level,norm,value,reference\n";
  const Level2RoughPath line = lift_piecewise_linear(SampledPath::from_function(
      TimeGrid(c.n_steps), 1, [](double t) -> Eigen::VectorXd { return Eigen::VectorXd::Constant(1, t); }));
  const double q = p.level1_integrability();
  const double e = q * (1.0 - p.alpha());
  const double exact = std::pow(1.0 / (e * (e + 1.0)), 1.0 / q);
  const double value = besov_norm(line, 1, p.alpha(), q);
  csv << "unit_line,1,besov," << num(value) << "," << num(exact) << "\n";
  csv << "unit_line,1,holder," << num(holder_norm(line, 1, p.alpha())) << ",1\n";

  const Level2RoughPath w = lift_piecewise_linear(brownian_polygon(c.n_steps, c.dim, c.seed));
  const EmbeddingReport r = embedding_check(w, p);
  csv << "brownian,1,besov," << num(r.besov_level1) << ",nan\n";
  csv << "brownian,1,holder," << num(r.holder_level1) << ",nan\n";
  csv << "brownian,2,besov," << num(r.besov_level2) << ",nan\n";
  csv << "brownian,2,holder," << num(r.holder_level2) << ",nan\n";
  out.write("norms.csv", csv.str());
  out.summary = {{"unit_line_relative_error", std::abs(value / exact - 1.0)},
                 {"embedding_ratio_level1", r.ratio_level1.value_or(NAN)},
                 {"embedding_ratio_level2", r.ratio_level2.value_or(NAN)}};
  out.write_json("norms.json", out.summary);
}

void run_decay(const ExperimentConfig& c, Output& out) {
  const BesovParams p(c.alpha, c.m);
  const DecayTable t = decay_experiment(p, c.k_lo, c.k_hi, static_cast<int>(c.n_mc), c.dim, c.seed,
                                        c.workers);
  std::ostringstream csv;
  csv << "k,statistic,estimate,stderr,fitted_slope\n";
  for (const DecayRow& r : t.rows) {
    csv << r.k << "," << r.statistic << "," << num(r.estimate) << "," << num(r.stderr_) << ","
        << num(t.fit(r.statistic).slope) << "\n";
  }
  out.write("decay.csv", csv.str());
  json fits = json::array();
  for (const DecayFit& f : t.fits) {
    fits.push_back({{"statistic", f.statistic}, {"slope", f.slope}, {"intercept", f.intercept},
                    {"bound", f.bound}});
  }
  const double s1 = t.fit(kStatLevel1).slope;
  const double limit = decay_slope_bound(p) + 0.1;
  out.summary = {{"fits", fits}, {"level1_slope_limit", limit}, {"level1_within_limit", s1 <= limit},
                 {"insufficient_samples", t.insufficient_samples}};
  out.write_json("decay.json", out.summary);
  if (t.insufficient_samples) out.warnings.push_back("fewer than 100 samples per level");
  if (s1 > limit) out.warnings.push_back("level-1 slope " + num(s1) + " above " + num(limit));
}

void run_skeleton(const ExperimentConfig& c, Output& out) {
  const CatalogSystem sys = make_system(c.system, c.params);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(sys.system.d());
  for (std::size_t k = 0; k < c.control.size(); ++k) u(k) = c.control[k];
  const CameronMartinPath h = CameronMartinPath::linear(TimeGrid(c.n_steps), u);
  const SkeletonSolution s = solve_skeleton(sys.system, h, sys.a);
  std::ostringstream csv;
  csv << "t";
  for (int i = 0; i < s.n; ++i) csv << ",phi_" << i + 1;
  csv << "\n";
  for (int i = 0; i <= c.n_steps; ++i) {
    csv << num(s.grid.time(i));
    for (int k = 0; k < s.n; ++k) csv << "," << num(s.phi[i](k));
    csv << "\n";
  }
  out.write("skeleton.csv", csv.str());
  const Mat cov = det_malliavin_cov(s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(cov)};
  out.summary = {{"endpoint", vec_json(s.endpoint())},
                 {"energy", h.energy()},
                 {"det_malliavin_cov", mat_json(cov)},
                 {"cov_min_eigenvalue", es.eigenvalues().minCoeff()}};
  out.write_json("skeleton.json", out.summary);
}

void write_action(const RateResult& r, const ActionProblem& p, Output& out) {
  json trace = json::array();
  for (const OuterStep& s : r.trace) {
    trace.push_back({{"iteration", s.iteration}, {"value", s.value}, {"feasibility", s.feasibility},
                     {"stationarity", s.stationarity}, {"mu", s.mu},
                     {"inner_iterations", s.inner_iterations}});
  }
  const bool feasible = r.status != ActionStatus::kInfeasible;
  out.summary = {{"status", to_string(r.status)},
                 {"value", feasible ? json(r.value) : json("inf")},
                 {"residual", r.residual},
                 {"stationarity", r.stationarity},
                 {"kkt_residual", feasible ? first_order_residual(r, p) : NAN},
                 {"multiplier", vec_json(r.multiplier)},
                 {"n_minima", r.minima.size()},
                 {"best_start", r.best_start},
                 {"failed_starts", r.failed_starts},
                 {"feasibility_tolerance", r.feas_tol},
                 {"message", r.message},
                 {"trace", trace}};
  out.write_json("action.json", out.summary);
  std::ostringstream csv;
  const int d = r.h.dim();
  csv << "cell,t";
  for (int k = 0; k < d; ++k) csv << ",dh_" << k + 1;
  csv << "\n";
  for (int i = 0; i < r.h.grid().n_steps(); ++i) {
    csv << i << "," << num(r.h.grid().time(i));
    for (double v : r.h.derivative(i)) csv << "," << num(v);
    csv << "\n";
  }
  out.write("action_control.csv", csv.str());
}

void run_action(const ExperimentConfig& c, Output& out) {
  const ActionProblem p = make_problem(c);
  const RateResult r = minimize_action(p);
  write_action(r, p, out);
  if (r.status == ActionStatus::kStalled) out.warnings.push_back("action solver stalled: " + r.message);
  if (r.status == ActionStatus::kInfeasible) {
    throw NumericalError("action minimisation found no feasible control: " + r.message);
  }
}

void run_pinned(const ExperimentConfig& c, Output& out) {
  const ActionProblem prob = make_problem(c);
  const RateResult best = solve_action(prob);
  const Event ball = Event::besov_ball(best.h, c.r_min, BesovParams(c.alpha, c.m));
  std::ostringstream csv;
  csv << "eps,estimate,stderr,ess,total,total_stderr,normalized,normalized_stderr\n";
  json rows = json::array();
  for (std::size_t i = 0; i < c.eps_ladder.size(); ++i) {
    const double eps = c.eps_ladder[i];
    SamplingOptions opts;
    opts.n_steps = c.n_steps;
    opts.workers = c.workers;
    opts.shift = best.h;
    const PinnedEstimate e = estimate_pinned_functional(
        prob.vf, eps, prob.a, ball, MollifierKernel(c.c_eta * eps, prob.a_prime), c.n_mc,
        mix_seed(c.seed, i), opts);
    csv << num(eps) << "," << num(e.weight.value) << "," << num(e.weight.stderr_) << ","
        << num(e.weight.ess) << "," << num(e.total.value) << "," << num(e.total.stderr_) << ","
        << num(e.normalized) << "," << num(e.normalized_stderr) << "\n";
    rows.push_back({{"eps", eps}, {"weight", estimate_json(e.weight)},
                    {"total", estimate_json(e.total)}, {"normalized", e.normalized},
                    {"normalized_stderr", e.normalized_stderr}});
    estimate_warnings(out, "eps " + num(eps), e.weight);
  }
  out.write("pinned.csv", csv.str());
  out.summary = {{"event", ball.describe()}, {"rate_minimum", best.value}, {"rows", rows},
                 {"mollifier_note", kMollifierNote}};
  out.write_json("pinned.json", out.summary);
}

void run_sweep(const ExperimentConfig& c, Output& out) {
  const ActionProblem prob = make_problem(c);
  const RateResult best = solve_action(prob);
  LdpSweepConfig cfg;
  cfg.eps_ladder = c.eps_ladder;
  cfg.n_mc = c.n_mc;
  cfg.c_eta = c.c_eta;
  cfg.seed = c.seed;
  cfg.n_steps = c.n_steps;
  cfg.workers = c.workers;
  cfg.min_hits = c.min_hits;
  std::optional<CameronMartinPath> g;
  if (c.high_ball) g = high_energy_path(c.n_steps);
  cfg.events = standard_events(prob, best, BesovParams(c.alpha, c.m), c.r_min, g, c.r_high);
  const LdpResult res = ldp_sweep(cfg, prob);

  std::ostringstream csv;
  csv << "eps,event_id,estimate,stderr,ess,eps2_log,target_rate\n";
  for (const LdpRow& r : res.rows) {
    csv << num(r.eps) << "," << r.event_id << "," << num(r.estimate.value) << ","
        << num(r.estimate.stderr_) << "," << num(r.estimate.ess) << "," << num(r.eps2_log) << ","
        << num(r.target_rate) << "\n";
    estimate_warnings(out, r.event_id + " at eps " + num(r.eps), r.estimate);
  }
  out.write("sweep.csv", csv.str());
  json fits = json::array();
  for (const LdpFit& f : res.fits) {
    fits.push_back({{"event_id", f.event_id}, {"fitted_rate", f.fitted_rate}, {"slope", f.slope},
                    {"eps2_log_smallest", f.eps2_log_smallest}, {"target_rate", f.target_rate},
                    {"n_used", f.n_used}, {"excluded_eps", f.excluded_eps}});
    if (f.n_used < 2) out.warnings.push_back(f.event_id + ": fewer than two eps resolved");
  }
  json events = json::array();
  for (const EventSpec& e : cfg.events) events.push_back({{"id", e.id}, {"event", e.event.describe()}});
  out.summary = {{"fits", fits},
                 {"events", events},
                 {"rate_minimum", best.value},
                 {"regression", "eps^2 log mu + n eps^2 log eps = r + beta eps^2, n = state dimension"},
                 {"config", serialize_config(c)},
                 {"mollifier_note", kMollifierNote}};
  out.write_json("sweep.json", out.summary);
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

double to_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("plotdata: not a number: '" + s + "'");
  }
}

}  // namespace

const char* version() { return LDPLAB_VERSION; }

CameronMartinPath high_energy_path(int n) {
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2 * M_PI * i / n, b = 2 * M_PI * (i + 1) / n;
    d[i] = 1.0 + std::sqrt(6.0) * (std::sin(b) - std::sin(a)) / (b - a);
  }
  return CameronMartinPath(TimeGrid(n), 1, std::move(d));
}

std::vector<std::string> run(const ExperimentConfig& c) {
  validate(c);
  Output out;
  out.dir = c.out;
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  if (ec) throw IoError("cannot create " + c.out + ": " + ec.message());

  const auto t0 = std::chrono::steady_clock::now();
  const std::string config_text = serialize_config(c);
  auto manifest = [&](const std::string& status) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json m = {{"kind", c.kind},
              {"config_hash", config_hash(c)},
              {"seed", c.seed},
              {"version", version()},
              {"status", status},
              {"warnings", out.warnings},
              {"config", config_text},
              {"mollifier_note", kMollifierNote},
              {"timestamp", {{"utc", utc_now()}, {"wall_time_s", wall}}}};
    out.write_json("manifest.json", m);
  };

  try {
    if (c.kind == "lift-check") run_lift_check(c, out);
    else if (c.kind == "norms") run_norms(c, out);
    else if (c.kind == "dyadic-decay") run_decay(c, out);
    else if (c.kind == "skeleton") run_skeleton(c, out);
    else if (c.kind == "minimize-action") run_action(c, out);
    else if (c.kind == "mc-pinned") run_pinned(c, out);
    else run_sweep(c, out);
  } catch (const NumericalError& e) {
    manifest(std::string("numerical failure: ") + e.what());
    throw;
  }
  manifest("ok");
  return out.warnings;
}

void emit_plotdata(const std::vector<std::string>& inputs, const std::string& out_dir) {
  static const std::string kSweep = "eps,event_id,estimate,stderr,ess,eps2_log,target_rate";
  static const std::string kDecay = "k,statistic,estimate,stderr,fitted_slope";
  std::ostringstream csv;
  csv << "x,y,series,stderr\n";
  for (const std::string& path : inputs) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read " + path);
    std::string header;
    if (!std::getline(f, header)) continue;
    std::vector<std::vector<std::string>> rows;
    for (std::string line; std::getline(f, line);) {
      if (!line.empty()) rows.push_back(split(line));
    }
    if (header == kSweep) {
      std::vector<std::string> seen;
      for (const auto& r : rows) {
        if (r.size() != 7) throw ValidationError("plotdata: bad sweep row in " + path);
        const double eps = to_double(r[0]), est = to_double(r[2]), se = to_double(r[3]);
        const double e2l = to_double(r[5]);
        if (std::isfinite(e2l)) {
          csv << num(eps) << "," << num(e2l) << ",eps2_log:" << r[1] << "," << num(eps * eps * se / est)
              << "\n";
        }
        csv << num(eps) << "," << r[6] << ",target_rate:" << r[1] << ",0\n";
      }
    } else if (header == kDecay) {
      std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
      std::vector<std::string> order;
      for (const auto& r : rows) {
        if (r.size() != 5) throw ValidationError("plotdata: bad decay row in " + path);
        const double k = to_double(r[0]), est = to_double(r[2]), se = to_double(r[3]);
        const double y = std::log2(est);
        csv << num(k) << "," << num(y) << "," << r[1] << "," << num(se / (est * std::log(2.0))) << "\n";
        if (!series.count(r[1])) order.push_back(r[1]);
        series[r[1]].first.push_back(k);
        series[r[1]].second.push_back(y);
      }
      for (const std::string& name : order) {
        const auto& [ks, ys] = series[name];
        if (ks.size() < 2) continue;
        const auto [b, slope] = fit_line(ks, ys);
        for (double k : ks) csv << num(k) << "," << num(b + slope * k) << "," << name << ":fit,0\n";
      }
    } else {
      throw ValidationError("plotdata: unrecognised header in " + path + ": " + header);
    }
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  std::ofstream f(fs::path(out_dir) / "plotdata.csv", std::ios::binary);
  f << csv.str();
  if (!f) throw IoError("cannot write plotdata.csv in " + out_dir);
}

}  // namespace ldplab
