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
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "roughldp/action.hpp"
#include "roughldp/flow.hpp"
#include "roughldp/norms.hpp"
#include "roughldp/rough_core.hpp"
#include "roughldp/vector_fields.hpp"

namespace roughldp {

/// Normalised Gaussian kernel psi_eta(y) = N(y; center, eta^2 Id).
class MollifierKernel {
 public:
  MollifierKernel(double bandwidth, Vec center);

  double bandwidth() const noexcept { return eta_; }
  const Vec& center() const noexcept { return center_; }
  double operator()(const Vec& y) const;
  double log_density(const Vec& y) const;

 private:
  double eta_;
  Vec center_;
};

/// Mean of nonnegative weights x_i = exp(l_i), accumulated in log space.
struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();
  /// Standard error of log_value by the delta method (inf when value == 0).
  double log_stderr = std::numeric_limits<double>::infinity();
  double ess = 0.0;         // (sum x)^2 / sum x^2
  std::size_t n = 0;        // samples used (blow-ups excluded)
  std::size_t hits = 0;     // samples with x > 0
  std::size_t blowups = 0;  // samples discarded after solver blow-up

  bool zero() const { return hits == 0; }
  bool low_ess() const { return ess < 100.0; }
  double blowup_fraction() const {
    return n + blowups == 0 ? 0.0 : static_cast<double>(blowups) / (n + blowups);
  }
};

Estimate estimate_from_logs(const std::vector<double>& log_weights,
                            std::size_t blowups = 0);

/// Batch of driver paths w and solutions y^eps of the Stratonovich SDE,
/// solved by the step-2 scheme on the time-paired lift of eps w.
struct SdeBatch {
  std::vector<SampledPath> w;
  std::vector<SampledPath> y;
  std::size_t blowups = 0;
};

SdeBatch simulate_sde(const VectorFieldSystem& vf, double eps, const Vec& a,
                      const TimeGrid& grid, std::uint64_t seed, std::size_t n_mc,
                      int workers = 1);

/// Measurable predicate of the lifted driver eps W.
class Event {
 public:
  static Event everything();
  /// {X : ||(T_{-c} X)^1||_{alpha,4m} < R, ||(T_{-c} X)^2||_{2alpha,2m} < R^2}.
  static Event besov_ball(CameronMartinPath center, double radius, BesovParams params);
  static Event complement(const Event& e);
  static Event intersection(const Event& a, const Event& b);

  /// eps_w is the polygonal driver eps w; its lift is the rough path tested.
  bool contains(const SampledPath& eps_w) const;
  /// Ball centre, the natural Cameron-Martin shift for importance sampling.
  const CameronMartinPath* center() const;
  std::string describe() const;

  struct Node;  // expression tree, defined in the implementation

 private:
  explicit Event(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct SamplingOptions {
  int n_steps = 64;   // Monte Carlo grid
  int workers = 1;
  /// Cameron-Martin shift: w = w~ + shift / eps with likelihood weight.
  std::optional<CameronMartinPath> shift;
};

/// E[1_{A_k}(eps W) psi(y^eps_1)] for every event A_k from one shared
/// sample set.
std::vector<Estimate> estimate_events(const VectorFieldSystem& vf, double eps,
                                      const Vec& a, const std::vector<Event>& events,
                                      const MollifierKernel& kernel, std::size_t n_mc,
                                      std::uint64_t seed,
                                      const SamplingOptions& opts = {});

/// Mollified endpoint density E[psi(y^eps_1)].
Estimate estimate_heat_kernel(const VectorFieldSystem& vf, double eps, const Vec& a,
                              const MollifierKernel& kernel, std::size_t n_mc,
                              std::uint64_t seed, const SamplingOptions& opts = {});

struct PinnedEstimate {
  Estimate weight;     // E[1_A psi(y_1)]
  Estimate total;      // E[psi(y_1)] from the same samples
  double normalized = 0.0;  // weight / total
  double normalized_stderr = 0.0;
};

PinnedEstimate estimate_pinned_functional(const VectorFieldSystem& vf, double eps,
                                          const Vec& a, const Event& event,
                                          const MollifierKernel& kernel,
                                          std::size_t n_mc, std::uint64_t seed,
                                          const SamplingOptions& opts = {});

/// Malliavin covariance of the endpoint of the shifted equation
/// dy = sigma(y)[eps dw + dh] + b(eps, y) dt along one polygonal sample w.
struct PathwiseCovariance {
  Mat tau;     // eps^2 J_1 int J_s^{-1} sigma sigma^T J_s^{-T} ds J_1^T
  Mat scaled;  // tau / eps^2
  double min_eigenvalue = 0.0;  // of scaled
  bool singular = false;        // J_1 numerically singular
};

PathwiseCovariance pathwise_malliavin_cov(const VectorFieldSystem& vf, double eps,
                                          const CameronMartinPath& h,
                                          const SampledPath& w, const Vec& a);

struct NondegeneracyRow {
  double eps;
  double min_eigenvalue;    // over samples, of tau/eps^2
  Mat mean;                 // sample mean of tau/eps^2
  Mat stderr_;              // entrywise standard errors
  std::size_t singular = 0;
};

/// pathwise_malliavin_cov over n_mc Brownian samples per eps.
std::vector<NondegeneracyRow> nondegeneracy_scan(const VectorFieldSystem& vf,
                                                 const CameronMartinPath& h,
                                                 const Vec& a,
                                                 const std::vector<double>& eps_ladder,
                                                 std::size_t n_mc, std::uint64_t seed,
                                                 int n_steps, int workers = 1);

struct BallDecayRow {
  double radius;
  double probability;  // P(||W^i||^{1/i} >= R)
  double stderr_;
  std::size_t hits;
};

struct BallDecayTable {
  int level = 1;
  std::vector<BallDecayRow> rows;
  double median = 0.0;
  double iqr = 0.0;
  double slope = 0.0;      // of log P against R^2
  double intercept = 0.0;
  int n_fit = 0;           // rows with >= 10 hits used in the fit
  bool insufficient = false;
};

/// Norms ||W^1||_{alpha,4m} and ||W^2||^{1/2}_{2alpha,2m} of n_mc Brownian
/// polygons on 2^k_level cells.
std::vector<std::pair<double, double>> brownian_ball_norms(
    const BesovParams& params, int dim, int k_level, std::size_t n_mc,
    std::uint64_t seed, int workers = 1);

/// Tail probabilities over radii from the median to median + 3 IQR,
/// evenly spaced in R^2, for both levels; log P regressed on R^2.
std::vector<BallDecayTable> ball_decay_probe(const BesovParams& params, int dim,
                                             int k_level, int n_radii,
                                             std::size_t n_mc, std::uint64_t seed,
                                             int workers = 1);

/// Same probe for given norm samples (scale them by eps for eps W).
BallDecayTable ball_decay_from_norms(const std::vector<double>& norms, int level,
                                     const std::vector<double>& radii);

struct EventSpec {
  std::string id;
  Event event;
  std::optional<CameronMartinPath> shift;  // importance-sampling shift
  double target_rate;                      // -inf of I over the event
};

struct LdpSweepConfig {
  std::vector<double> eps_ladder{0.5, 0.35, 0.25, 0.175, 0.125};
  std::size_t n_mc = 100000;
  double c_eta = 0.25;         // eta(eps) = c_eta eps
  std::uint64_t seed = 1;
  int n_steps = 64;
  int workers = 1;
  std::size_t min_hits = 10;   // fewer hits excludes an (eps, event) cell
  std::vector<EventSpec> events;
};

struct LdpRow {
  double eps;
  std::string event_id;
  Estimate estimate;
  double eps2_log;    // eps^2 log estimate (NaN when excluded)
  double target_rate;
  bool used;
};

struct LdpFit {
  std::string event_id;
  double fitted_rate;       // intercept of eps^2 log mu + n eps^2 log eps on eps^2
  double slope;
  double eps2_log_smallest; // at the smallest eps used
  double target_rate;
  int n_used;
  std::vector<double> excluded_eps;
};

struct LdpResult {
  std::vector<LdpRow> rows;
  std::vector<LdpFit> fits;
  const LdpFit& fit(const std::string& id) const;
};

/// Event specs of the standard sweep: "whole" (everything, shifted by h*),
/// "ball_min" (ball of radius r_min around S_2(h*)) and, when g is given,
/// "ball_high" (ball of radius r_high around S_2(g)).
std::vector<EventSpec> standard_events(const ActionProblem& problem,
                                       const RateResult& best, const BesovParams& params,
                                       double r_min,
                                       const std::optional<CameronMartinPath>& g,
                                       double r_high);

LdpResult ldp_sweep(const LdpSweepConfig& cfg, const ActionProblem& problem);

/// Fit of y = r + beta x by least squares; returns {r, beta}.
std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y);

}  // namespace roughldp
