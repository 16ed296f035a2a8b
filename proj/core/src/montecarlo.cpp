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

#include "roughldp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "roughldp/error.hpp"
#include "roughldp/parallel.hpp"

namespace roughldp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t n_blocks(std::size_t n_mc) {
  return (n_mc + kSamplesPerBlock - 1) / kSamplesPerBlock;
}

// Based Brownian polygon on `grid` from consecutive normals of `rng`.
void draw_brownian(RandomStream& rng, const TimeGrid& grid, int dim,
                   std::vector<double>& values) {
  const double sd = std::sqrt(grid.dt());
  values.assign(static_cast<std::size_t>(grid.n_nodes()) * dim, 0.0);
  for (int i = 0; i < grid.n_steps(); ++i) {
    for (int p = 0; p < dim; ++p) {
      values[static_cast<std::size_t>(i + 1) * dim + p] =
          values[static_cast<std::size_t>(i) * dim + p] + sd * rng.normal();
    }
  }
}

Vec endpoint_of(const SampledPath& y) {
  const int last = y.grid().n_steps();
  Vec v(y.dim());
  for (int k = 0; k < y.dim(); ++k) v(k) = y(last, k);
  return v;
}

void check_eps(double eps, const char* who) {
  if (!(eps > 0.0)) throw ValidationError(std::string(who) + ": eps must be positive");
}

}  // namespace

MollifierKernel::MollifierKernel(double bandwidth, Vec center)
    : eta_(bandwidth), center_(std::move(center)) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ValidationError("MollifierKernel: bandwidth must be positive");
  }
}

double MollifierKernel::log_density(const Vec& y) const {
  const double n = static_cast<double>(center_.size());
  const double r2 = (y - center_).squaredNorm();
  return -0.5 * r2 / (eta_ * eta_) - n * std::log(eta_) - 0.5 * n * std::log(2.0 * M_PI);
}

double MollifierKernel::operator()(const Vec& y) const { return std::exp(log_density(y)); }

Estimate estimate_from_logs(const std::vector<double>& log_weights, std::size_t blowups) {
  Estimate e;
  e.blowups = blowups;
  double top = kNegInf;
  for (double l : log_weights) {
    if (std::isnan(l)) continue;
    ++e.n;
    if (l > kNegInf) {
      ++e.hits;
      top = std::max(top, l);
    }
  }
  if (e.n == 0 || e.hits == 0) return e;
  std::vector<double> x;
  x.reserve(e.n);
  for (double l : log_weights) {
    if (!std::isnan(l)) x.push_back(std::exp(l - top));
  }
  const double n = static_cast<double>(e.n);
  const double sum = pairwise_sum(x);
  const double mean = sum / n;
  std::vector<double> dev(x.size()), sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    dev[i] = (x[i] - mean) * (x[i] - mean);
    sq[i] = x[i] * x[i];
  }
  const double var = e.n > 1 ? pairwise_sum(dev) / (n - 1.0) : 0.0;
  const double se_scaled = std::sqrt(var / n);
  e.log_value = top + std::log(mean);
  e.value = std::exp(e.log_value);
  e.stderr_ = std::exp(top) * se_scaled;
  e.log_stderr = se_scaled / mean;
  e.ess = sum * sum / pairwise_sum(sq);
  return e;
}

SdeBatch simulate_sde(const VectorFieldSystem& vf, double eps, const Vec& a,
                      const TimeGrid& grid, std::uint64_t seed, std::size_t n_mc,
                      int workers) {
  check_eps(eps, "simulate_sde");
  const int d = vf.d();
  std::vector<std::optional<SampledPath>> ws(n_mc), ys(n_mc);
  parallel_for(n_blocks(n_mc), workers, [&](std::size_t b) {
    RandomStream rng(seed, b);
    std::vector<double> vals;
    const std::size_t end = std::min(n_mc, (b + 1) * kSamplesPerBlock);
    for (std::size_t s = b * kSamplesPerBlock; s < end; ++s) {
      draw_brownian(rng, grid, d, vals);
      SampledPath w(grid, d, vals);
      try {
        const Level2RoughPath x = young_pair(lift_piecewise_linear(w.scaled(eps)));
        ys[s] = solve_rde_level2(vf, x, eps, a);
        ws[s] = std::move(w);
      } catch (const NumericalError&) {
      }
    }
  });
  SdeBatch out;
  for (std::size_t s = 0; s < n_mc; ++s) {
    if (!ys[s]) {
      ++out.blowups;
      continue;
    }
    out.w.push_back(std::move(*ws[s]));
    out.y.push_back(std::move(*ys[s]));
  }
  return out;
}

struct Event::Node {
  enum class Kind { kAll, kBall, kNot, kAnd } kind = Kind::kAll;
  std::optional<CameronMartinPath> center;
  double radius = 0.0;
  std::optional<BesovParams> params;
  std::shared_ptr<const Node> left, right;
};

Event Event::everything() { return Event(std::make_shared<const Node>()); }

Event Event::besov_ball(CameronMartinPath center, double radius, BesovParams params) {
  if (!(radius > 0.0)) throw ValidationError("besov_ball: radius must be positive");
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::kBall;
  node->center = std::move(center);
  node->radius = radius;
  node->params = params;
  return Event(std::move(node));
}

Event Event::complement(const Event& e) {
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::kNot;
  node->left = e.node_;
  return Event(std::move(node));
}

Event Event::intersection(const Event& a, const Event& b) {
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::kAnd;
  node->left = a.node_;
  node->right = b.node_;
  return Event(std::move(node));
}

namespace {

bool ball_contains(const CameronMartinPath& center, double radius,
                   const BesovParams& p, const SampledPath& eps_w) {
  if (center.dim() != eps_w.dim()) {
    throw ValidationError("besov_ball: driver dimension mismatch");
  }
  const TimeGrid g = eps_w.grid().common_refinement(center.grid());
  const SampledPath x = eps_w.grid() == g ? eps_w : eps_w.refined(g);
  const SampledPath c = center.grid() == g ? center.path() : center.path().refined(g);
  const SampledPath z = x - c;
  const int d = z.dim();
  const double m1 = p.level1_integrability();
  const double bound = std::pow(radius, m1);  // R^{4m} = (R^2)^{2m}
  const auto sq1 = [&](int i, int j) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      const double v = z(j, k) - z(i, k);
      s += v * v;
    }
    return s;
  };
  if (!(besov_integral_of(g, sq1, p.alpha(), m1) < bound)) return false;
  const double m2 = p.level2_integrability();
  if (d == 1) {
    // X^2 = (X^1)^2 / 2 in one dimension
    const auto sq2 = [&](int i, int j) {
      const double s = sq1(i, j);
      return 0.25 * s * s;
    };
    return besov_integral_of(g, sq2, 2.0 * p.alpha(), m2) < bound;
  }
  const Level2RoughPath lz = lift_piecewise_linear(z);
  return besov_integral_of(
             g, [&](int i, int j) { return lz.second_sq_norm(i, j); }, 2.0 * p.alpha(),
             m2) < bound;
}

bool node_contains(const Event::Node& n, const SampledPath& eps_w);

}  // namespace

bool Event::contains(const SampledPath& eps_w) const {
  return node_contains(*node_, eps_w);
}

namespace {

bool node_contains(const Event::Node& n, const SampledPath& eps_w) {
  using Kind = Event::Node::Kind;
  switch (n.kind) {
    case Kind::kAll:
      return true;
    case Kind::kBall:
      return ball_contains(*n.center, n.radius, *n.params, eps_w);
    case Kind::kNot:
      return !node_contains(*n.left, eps_w);
    case Kind::kAnd:
      return node_contains(*n.left, eps_w) && node_contains(*n.right, eps_w);
  }
  return false;
}

}  // namespace

const CameronMartinPath* Event::center() const {
  return node_->kind == Node::Kind::kBall ? &*node_->center : nullptr;
}

std::string Event::describe() const {
  using Kind = Node::Kind;
  std::ostringstream os;
  switch (node_->kind) {
    case Kind::kAll:
      os << "everything";
      break;
    case Kind::kBall:
      os << "besov_ball(R=" << node_->radius << ", alpha=" << node_->params->alpha()
         << ", m=" << node_->params->m() << ", center energy=" << node_->center->energy()
         << ")";
      break;
    case Kind::kNot:
      os << "not(" << Event(node_->left).describe() << ")";
      break;
    case Kind::kAnd:
      os << "and(" << Event(node_->left).describe() << ", "
         << Event(node_->right).describe() << ")";
      break;
  }
  return os.str();
}

namespace {

// logs[k * n_mc + s]: log of 1_{A_k} psi(y_1) times the likelihood weight;
// NaN marks a blown-up sample.
struct SampleLogs {
  std::vector<double> logs;
  std::size_t n_mc = 0;
  std::size_t blowups = 0;

  std::vector<double> event(std::size_t k) const {
    return {logs.begin() + static_cast<std::ptrdiff_t>(k * n_mc),
            logs.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_mc)};
  }
};

SampleLogs sample_event_logs(const VectorFieldSystem& vf, double eps, const Vec& a,
                             const std::vector<Event>& events,
                             const MollifierKernel& kernel, std::size_t n_mc,
                             std::uint64_t seed, const SamplingOptions& opts) {
  check_eps(eps, "estimate_events");
  if (n_mc == 0) throw ValidationError("estimate_events: n_mc must be positive");
  if (kernel.center().size() != vf.n()) {
    throw ValidationError("estimate_events: kernel centre must live in the state space");
  }
  const int d = vf.d();
  const TimeGrid grid(opts.n_steps);
  std::optional<SampledPath> shift_path;
  std::vector<double> shift_der;
  double shift_energy = 0.0;
  if (opts.shift) {
    if (opts.shift->dim() != d) throw ValidationError("estimate_events: shift dimension mismatch");
    const CameronMartinPath h = opts.shift->grid() == grid
                                    ? *opts.shift
                                    : opts.shift->refined(grid);
    shift_path = h.path();
    shift_der = h.derivatives();
    shift_energy = h.norm_sq();
  }
  const std::size_t n_ev = events.size();
  std::vector<double> logs(n_ev * n_mc);
  std::vector<unsigned char> blew(n_mc, 0);
  parallel_for(n_blocks(n_mc), opts.workers, [&](std::size_t b) {
    RandomStream rng(seed, b);
    std::vector<double> vals;
    const std::size_t end = std::min(n_mc, (b + 1) * kSamplesPerBlock);
    for (std::size_t s = b * kSamplesPerBlock; s < end; ++s) {
      draw_brownian(rng, grid, d, vals);
      double log_w = 0.0;
      if (shift_path) {
        double dot = 0.0;
        for (int i = 0; i < grid.n_steps(); ++i) {
          for (int p = 0; p < d; ++p) {
            const std::size_t k = static_cast<std::size_t>(i) * d + p;
            dot += shift_der[k] * (vals[k + d] - vals[k]);
          }
        }
        log_w = -dot / eps - 0.5 * shift_energy / (eps * eps);
      }
      SampledPath eps_w = SampledPath(grid, d, vals).scaled(eps);
      if (shift_path) eps_w = eps_w + *shift_path;
      double log_psi;
      try {
        const SampledPath y =
            solve_rde_level2(vf, young_pair(lift_piecewise_linear(eps_w)), eps, a);
        log_psi = kernel.log_density(endpoint_of(y));
      } catch (const NumericalError&) {
        blew[s] = 1;
        for (std::size_t k = 0; k < n_ev; ++k) logs[k * n_mc + s] = kNaN;
        continue;
      }
      for (std::size_t k = 0; k < n_ev; ++k) {
        logs[k * n_mc + s] = events[k].contains(eps_w) ? log_psi + log_w : kNegInf;
      }
    }
  });
  SampleLogs out;
  out.n_mc = n_mc;
  for (unsigned char c : blew) out.blowups += c;
  out.logs = std::move(logs);
  return out;
}

}  // namespace

std::vector<Estimate> estimate_events(const VectorFieldSystem& vf, double eps,
                                      const Vec& a, const std::vector<Event>& events,
                                      const MollifierKernel& kernel, std::size_t n_mc,
                                      std::uint64_t seed, const SamplingOptions& opts) {
  const SampleLogs sl = sample_event_logs(vf, eps, a, events, kernel, n_mc, seed, opts);
  std::vector<Estimate> out;
  out.reserve(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) {
    out.push_back(estimate_from_logs(sl.event(k), sl.blowups));
  }
  return out;
}

Estimate estimate_heat_kernel(const VectorFieldSystem& vf, double eps, const Vec& a,
                              const MollifierKernel& kernel, std::size_t n_mc,
                              std::uint64_t seed, const SamplingOptions& opts) {
  return estimate_events(vf, eps, a, {Event::everything()}, kernel, n_mc, seed, opts)[0];
}

PinnedEstimate estimate_pinned_functional(const VectorFieldSystem& vf, double eps,
                                          const Vec& a, const Event& event,
                                          const MollifierKernel& kernel,
                                          std::size_t n_mc, std::uint64_t seed,
                                          const SamplingOptions& opts) {
  const SampleLogs sl = sample_event_logs(vf, eps, a, {event, Event::everything()},
                                          kernel, n_mc, seed, opts);
  const std::vector<double> la = sl.event(0);
  const std::vector<double> lt = sl.event(1);
  PinnedEstimate p;
  p.weight = estimate_from_logs(la, sl.blowups);
  p.total = estimate_from_logs(lt, sl.blowups);
  if (p.total.zero()) return p;
  double top = kNegInf;
  for (double l : lt) {
    if (!std::isnan(l)) top = std::max(top, l);
  }
  std::vector<double> xa, xt;
  for (std::size_t s = 0; s < lt.size(); ++s) {
    if (std::isnan(lt[s])) continue;
    xa.push_back(std::exp(la[s] - top));
    xt.push_back(std::exp(lt[s] - top));
  }
  const double n = static_cast<double>(xt.size());
  const double st = pairwise_sum(xt);
  const double r = pairwise_sum(xa) / st;
  std::vector<double> res(xt.size());
  for (std::size_t s = 0; s < xt.size(); ++s) {
    const double e = xa[s] - r * xt[s];
    res[s] = e * e;
  }
  p.normalized = r;
  p.normalized_stderr =
      n > 1 ? std::sqrt(pairwise_sum(res) / (n - 1.0) / n) / (st / n) : 0.0;
  return p;
}

PathwiseCovariance pathwise_malliavin_cov(const VectorFieldSystem& vf, double eps,
                                          const CameronMartinPath& h,
                                          const SampledPath& w, const Vec& a) {
  check_eps(eps, "pathwise_malliavin_cov");
  if (w.dim() != vf.d() || h.dim() != vf.d()) {
    throw ValidationError("pathwise_malliavin_cov: driver dimension mismatch");
  }
  const CameronMartinPath u = CameronMartinPath::from_path(w.scaled(eps)) + h;
  FlowOptions opts;
  opts.tangents = false;
  opts.covariance = true;
  const SkeletonSolution s = solve_controlled(vf, u, a, eps, opts);
  PathwiseCovariance out;
  out.scaled = s.cov;
  out.tau = eps * eps * s.cov;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(s.cov),
                                                    Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues()(0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(s.M.back()));
  const auto& sv = svd.singularValues();
  out.singular = !(sv(sv.size() - 1) > 1e-12 * std::max(1.0, sv(0)));
  return out;
}

std::vector<NondegeneracyRow> nondegeneracy_scan(const VectorFieldSystem& vf,
                                                 const CameronMartinPath& h,
                                                 const Vec& a,
                                                 const std::vector<double>& eps_ladder,
                                                 std::size_t n_mc, std::uint64_t seed,
                                                 int n_steps, int workers) {
  if (n_mc < 2) throw ValidationError("nondegeneracy_scan: need n_mc >= 2");
  const TimeGrid grid(n_steps);
  const CameronMartinPath hg = h.grid() == grid ? h : h.refined(grid);
  const int n = vf.n();
  std::vector<NondegeneracyRow> rows;
  for (std::size_t e = 0; e < eps_ladder.size(); ++e) {
    const double eps = eps_ladder[e];
    std::vector<PathwiseCovariance> cov(n_mc);
    const std::uint64_t stream_seed = mix_seed(seed, e);
    parallel_for(n_blocks(n_mc), workers, [&](std::size_t b) {
      RandomStream rng(stream_seed, b);
      std::vector<double> vals;
      const std::size_t end = std::min(n_mc, (b + 1) * kSamplesPerBlock);
      for (std::size_t s = b * kSamplesPerBlock; s < end; ++s) {
        draw_brownian(rng, grid, vf.d(), vals);
        cov[s] = pathwise_malliavin_cov(vf, eps, hg, SampledPath(grid, vf.d(), vals), a);
      }
    });
    NondegeneracyRow row{eps, std::numeric_limits<double>::infinity(), Mat::Zero(n, n),
                         Mat::Zero(n, n), 0};
    std::vector<double> entry(n_mc);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (std::size_t s = 0; s < n_mc; ++s) entry[s] = cov[s].scaled(i, j);
        const double mean = pairwise_sum(entry) / static_cast<double>(n_mc);
        for (double& x : entry) x = (x - mean) * (x - mean);
        const double var = pairwise_sum(entry) / static_cast<double>(n_mc - 1);
        row.mean(i, j) = mean;
        row.stderr_(i, j) = std::sqrt(var / static_cast<double>(n_mc));
      }
    }
    for (const auto& c : cov) {
      row.min_eigenvalue = std::min(row.min_eigenvalue, c.min_eigenvalue);
      row.singular += c.singular ? 1 : 0;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::pair<double, double>> brownian_ball_norms(const BesovParams& params,
                                                           int dim, int k_level,
                                                           std::size_t n_mc,
                                                           std::uint64_t seed,
                                                           int workers) {
  if (k_level < 1 || k_level > 12) throw ValidationError("brownian_ball_norms: bad level");
  const TimeGrid grid = TimeGrid::dyadic(k_level);
  std::vector<std::pair<double, double>> out(n_mc);
  parallel_for(n_blocks(n_mc), workers, [&](std::size_t b) {
    RandomStream rng(seed, b);
    std::vector<double> vals;
    const std::size_t end = std::min(n_mc, (b + 1) * kSamplesPerBlock);
    for (std::size_t s = b * kSamplesPerBlock; s < end; ++s) {
      draw_brownian(rng, grid, dim, vals);
      const Level2RoughPath x = lift_piecewise_linear(SampledPath(grid, dim, vals));
      const double n1 = besov_norm(x, 1, params.alpha(), params.level1_integrability());
      const double n2 =
          besov_norm(x, 2, 2.0 * params.alpha(), params.level2_integrability());
      out[s] = {n1, std::sqrt(n2)};
    }
  });
  return out;
}

std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw ValidationError("fit_line: bad input");
  if (x.size() == 1) return {y[0], 0.0};
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return {sy / n, 0.0};
  const double slope = (n * sxy - sx * sy) / den;
  return {(sy - slope * sx) / n, slope};
}

BallDecayTable ball_decay_from_norms(const std::vector<double>& norms, int level,
                                     const std::vector<double>& radii) {
  BallDecayTable t;
  t.level = level;
  const double n = static_cast<double>(norms.size());
  std::vector<double> xs, ys;
  for (double r : radii) {
    std::size_t hits = 0;
    for (double v : norms) hits += v >= r ? 1 : 0;
    const double p = hits / n;
    t.rows.push_back({r, p, std::sqrt(p * (1.0 - p) / n), hits});
    if (hits >= 10) {
      xs.push_back(r * r);
      ys.push_back(std::log(p));
    }
  }
  t.n_fit = static_cast<int>(xs.size());
  t.insufficient = t.n_fit < 3;
  if (t.n_fit >= 2) {
    const auto [b, s] = fit_line(xs, ys);
    t.intercept = b;
    t.slope = s;
  } else {
    t.slope = kNaN;
    t.intercept = kNaN;
  }
  return t;
}

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(v.size() - 1, lo + 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

}  // namespace

std::vector<BallDecayTable> ball_decay_probe(const BesovParams& params, int dim,
                                             int k_level, int n_radii, std::size_t n_mc,
                                             std::uint64_t seed, int workers) {
  if (n_radii < 2) throw ValidationError("ball_decay_probe: need at least two radii");
  if (n_mc < 100) throw ValidationError("ball_decay_probe: need n_mc >= 100");
  const auto norms = brownian_ball_norms(params, dim, k_level, n_mc, seed, workers);
  std::vector<BallDecayTable> out;
  for (int level = 1; level <= 2; ++level) {
    std::vector<double> v(norms.size());
    for (std::size_t i = 0; i < norms.size(); ++i) {
      v[i] = level == 1 ? norms[i].first : norms[i].second;
    }
    const double med = quantile(v, 0.5);
    const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
    const double lo = med * med;
    const double hi = (med + 3.0 * iqr) * (med + 3.0 * iqr);
    std::vector<double> radii;
    for (int j = 0; j < n_radii; ++j) {
      radii.push_back(std::sqrt(lo + (hi - lo) * j / (n_radii - 1)));
    }
    BallDecayTable t = ball_decay_from_norms(v, level, radii);
    t.median = med;
    t.iqr = iqr;
    out.push_back(std::move(t));
  }
  return out;
}

const LdpFit& LdpResult::fit(const std::string& id) const {
  for (const auto& f : fits) {
    if (f.event_id == id) return f;
  }
  throw ValidationError("LdpResult: no event named " + id);
}

std::vector<EventSpec> standard_events(const ActionProblem& problem,
                                       const RateResult& best, const BesovParams& params,
                                       double r_min,
                                       const std::optional<CameronMartinPath>& g,
                                       double r_high) {
  if (best.status == ActionStatus::kInfeasible) {
    throw NumericalError("standard_events: the action minimisation found no feasible control");
  }
  std::vector<EventSpec> ev;
  ev.push_back({"whole", Event::everything(), best.h, -best.value});
  ev.push_back({"ball_min", Event::besov_ball(best.h, r_min, params), best.h, -best.value});
  if (g) {
    const double ig = rate_I(lift_piecewise_linear(g->path()), problem);
    ev.push_back({"ball_high", Event::besov_ball(*g, r_high, params), *g, -ig});
  }
  return ev;
}

LdpResult ldp_sweep(const LdpSweepConfig& cfg, const ActionProblem& problem) {
  if (cfg.eps_ladder.empty()) throw ValidationError("ldp_sweep: empty eps ladder");
  for (std::size_t i = 0; i < cfg.eps_ladder.size(); ++i) {
    if (!(cfg.eps_ladder[i] > 0.0) ||
        (i > 0 && !(cfg.eps_ladder[i] < cfg.eps_ladder[i - 1]))) {
      throw ValidationError("ldp_sweep: eps ladder must be positive and decreasing");
    }
  }
  if (!(cfg.c_eta > 0.0)) throw ValidationError("ldp_sweep: c_eta must be positive");
  if (cfg.events.empty()) throw ValidationError("ldp_sweep: no events");
  const double n = static_cast<double>(problem.vf.n());
  LdpResult res;
  for (std::size_t e = 0; e < cfg.eps_ladder.size(); ++e) {
    const double eps = cfg.eps_ladder[e];
    const MollifierKernel kernel(cfg.c_eta * eps, problem.a_prime);
    for (std::size_t k = 0; k < cfg.events.size(); ++k) {
      const EventSpec& spec = cfg.events[k];
      SamplingOptions opts;
      opts.n_steps = cfg.n_steps;
      opts.workers = cfg.workers;
      opts.shift = spec.shift;
      const Estimate est =
          estimate_events(problem.vf, eps, problem.a, {spec.event}, kernel, cfg.n_mc,
                          mix_seed(cfg.seed, e * 1024 + k), opts)[0];
      const bool used = est.hits >= cfg.min_hits && std::isfinite(est.log_value);
      res.rows.push_back({eps, spec.id, est, used ? eps * eps * est.log_value : kNaN,
                          spec.target_rate, used});
    }
  }
  for (const auto& spec : cfg.events) {
    LdpFit f{spec.id, kNaN, kNaN, kNaN, spec.target_rate, 0, {}};
    std::vector<double> xs, ys;
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& row : res.rows) {
      if (row.event_id != spec.id) continue;
      if (!row.used) {
        f.excluded_eps.push_back(row.eps);
        continue;
      }
      xs.push_back(row.eps * row.eps);
      ys.push_back(row.eps2_log + n * row.eps * row.eps * std::log(row.eps));
      if (row.eps < smallest) {
        smallest = row.eps;
        f.eps2_log_smallest = row.eps2_log;
      }
    }
    f.n_used = static_cast<int>(xs.size());
    if (!xs.empty()) {
      const auto [r, s] = fit_line(xs, ys);
      f.fitted_rate = r;
      f.slope = s;
    }
    res.fits.push_back(std::move(f));
  }
  return res;
}

}  // namespace roughldp
