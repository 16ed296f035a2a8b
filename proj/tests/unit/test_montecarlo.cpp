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

#include <gtest/gtest.h>

#include <cmath>

#include "roughldp/error.hpp"
#include "roughldp/montecarlo.hpp"
#include "test_util.hpp"

using namespace roughldp;

namespace {

Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

// density of N(0, s2) at x
double gauss(double x, double s2) { return std::exp(-0.5 * x * x / s2) / std::sqrt(2 * M_PI * s2); }

}  // namespace

TEST(EstimateFromLogs, Basics) {
  const auto e = estimate_from_logs({std::log(1.0), std::log(3.0), -INFINITY, NAN}, 1);
  EXPECT_EQ(e.n, 3u);
  EXPECT_EQ(e.hits, 2u);
  EXPECT_EQ(e.blowups, 1u);
  EXPECT_NEAR(e.value, 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(e.ess, 16.0 / 10.0, 1e-14);
  EXPECT_NEAR(e.stderr_, std::sqrt((std::pow(1 - 4.0 / 3, 2) + std::pow(3 - 4.0 / 3, 2) +
                                    std::pow(4.0 / 3, 2)) / 2 / 3),
              1e-14);
  EXPECT_TRUE(estimate_from_logs({-INFINITY, -INFINITY}).zero());
  // huge logs stay finite in log space
  const auto big = estimate_from_logs({-2000.0, -2000.0 + std::log(3.0)});
  EXPECT_NEAR(big.log_value, -2000.0 + std::log(2.0), 1e-12);
}

TEST(Mollifier, NormalisedAndValidated) {
  const MollifierKernel k(0.2, vec1(0.5));
  double sum = 0.0;
  for (int i = -4000; i <= 4000; ++i) sum += k(vec1(0.5 + i * 1e-3)) * 1e-3;
  EXPECT_NEAR(sum, 1.0, 1e-9);
  EXPECT_THROW(MollifierKernel(0.0, vec1(0.0)), ValidationError);
}

TEST(SimulateSde, AdditiveAndLinearMoments) {
  const auto add = make_system("additive").system;
  const double eps = 0.5;
  const auto batch = simulate_sde(add, eps, vec1(0.2), TimeGrid(16), 3, 20000);
  ASSERT_EQ(batch.y.size(), 20000u);
  double s = 0, s2 = 0;
  for (std::size_t i = 0; i < batch.y.size(); ++i) {
    const double e = batch.y[i](16, 0) - 0.2;
    EXPECT_NEAR(e, eps * batch.w[i](16, 0), 1e-14);
    s += e;
    s2 += e * e;
  }
  const double n = 20000;
  const double var = s2 / n - std::pow(s / n, 2);
  EXPECT_LT(std::abs(var - eps * eps), 3 * eps * eps * std::sqrt(2.0 / n));

  const auto lin = make_system("linear1d").system;
  const auto lb = simulate_sde(lin, eps, vec1(1.0), TimeGrid(64), 4, 20000);
  std::vector<double> ends;
  for (const auto& y : lb.y) ends.push_back(y(64, 0));
  double m = 0, v = 0;
  for (double x : ends) m += x / n;
  for (double x : ends) v += (x - m) * (x - m) / (n - 1);
  EXPECT_LT(std::abs(m - std::exp(eps * eps / 2)), 3 * std::sqrt(v / n));
}

TEST(SimulateSde, DeterministicAcrossWorkers) {
  const auto sys = make_system("rotating2d").system;
  Vec a = Vec::Zero(2);
  const auto b1 = simulate_sde(sys, 0.3, a, TimeGrid(32), 9, 700, 1);
  const auto b2 = simulate_sde(sys, 0.3, a, TimeGrid(32), 9, 700, 3);
  ASSERT_EQ(b1.y.size(), b2.y.size());
  for (std::size_t i = 0; i < b1.y.size(); ++i) EXPECT_EQ(b1.y[i].values(), b2.y[i].values());
}

TEST(HeatKernel, GaussianOracles) {
  const auto add = make_system("additive").system;
  SamplingOptions opts;
  opts.n_steps = 8;
  // eps = 1, a' = a: N(0, 1 + eta^2) at 0
  const auto c = estimate_heat_kernel(add, 1.0, vec1(0.0), MollifierKernel(0.1, vec1(0.0)), 40000, 1, opts);
  EXPECT_NEAR(c.value / (1 / std::sqrt(2 * M_PI)), 1.0, 0.05);
  EXPECT_LT(std::abs(c.value - gauss(0.0, 1.01)), 3 * c.stderr_);
  // bandwidth robustness: eta and eta / 2 both hit their exact convolutions
  for (double eta : {0.125, 0.0625}) {
    const auto e = estimate_heat_kernel(add, 0.5, vec1(0.0), MollifierKernel(eta, vec1(1.0)), 40000, 2, opts);
    EXPECT_LT(std::abs(e.value - gauss(1.0, 0.25 + eta * eta)), 3 * e.stderr_) << eta;
  }
}

TEST(Events, WholeComplementAndSaturation) {
  const auto add = make_system("additive").system;
  const BesovParams p(0.42, 4);
  const MollifierKernel k(0.125, vec1(1.0));
  const auto h = CameronMartinPath::linear(TimeGrid(32), Eigen::VectorXd::Ones(1));
  const Event ball = Event::besov_ball(h, 0.6, p);
  SamplingOptions opts;
  opts.n_steps = 32;
  const auto est = estimate_events(add, 0.5, vec1(0.0),
                                   {Event::everything(), ball, Event::complement(ball)}, k, 5000, 7, opts);
  const auto hk = estimate_heat_kernel(add, 0.5, vec1(0.0), k, 5000, 7, opts);
  EXPECT_EQ(est[0].value, hk.value);
  EXPECT_GT(est[1].hits, 0u);
  EXPECT_GT(est[2].hits, 0u);
  EXPECT_NEAR(est[1].value + est[2].value, est[0].value, 1e-12 * est[0].value);

  double prev = 0.0;
  for (double r : {0.5, 1.0, 4.0}) {
    const auto pin = estimate_pinned_functional(add, 0.5, vec1(0.0),
                                                Event::besov_ball(CameronMartinPath::zeros(TimeGrid(32), 1), r, p),
                                                k, 3000, 8, opts);
    EXPECT_GE(pin.normalized, prev);
    prev = pin.normalized;
  }
  EXPECT_NEAR(prev, 1.0, 1e-12);
}

TEST(Events, PartitionNormalises) {
  const auto add = make_system("additive").system;
  const BesovParams p(0.42, 4);
  const MollifierKernel k(0.125, vec1(1.0));
  const auto h = CameronMartinPath::linear(TimeGrid(32), Eigen::VectorXd::Ones(1));
  const Event b1 = Event::besov_ball(h, 0.5, p);
  const Event b2 = Event::besov_ball(CameronMartinPath::zeros(TimeGrid(32), 1), 0.8, p);
  SamplingOptions opts;
  opts.n_steps = 32;
  const std::vector<Event> parts{Event::intersection(b1, b2),
                                 Event::intersection(b1, Event::complement(b2)),
                                 Event::complement(b1)};
  double sum = 0.0, var = 0.0;
  for (const auto& e : parts) {
    const auto pin = estimate_pinned_functional(add, 0.5, vec1(0.0), e, k, 4000, 11, opts);
    sum += pin.normalized;
    var += pin.normalized_stderr * pin.normalized_stderr;
  }
  EXPECT_LT(std::abs(sum - 1.0), 3 * std::sqrt(var) + 1e-12);
}

TEST(ImportanceSampling, ShiftedAgreesWithPlain) {
  const auto add = make_system("additive").system;
  const MollifierKernel k(0.125, vec1(1.0));
  const auto h = CameronMartinPath::linear(TimeGrid(32), Eigen::VectorXd::Ones(1));
  const Event ball = Event::besov_ball(h, 0.8, BesovParams(0.42, 4));
  SamplingOptions plain;
  plain.n_steps = 32;
  SamplingOptions shifted = plain;
  shifted.shift = h;
  for (const Event& e : {Event::everything(), ball}) {
    const auto a = estimate_events(add, 0.5, vec1(0.0), {e}, k, 20000, 21, plain)[0];
    const auto b = estimate_events(add, 0.5, vec1(0.0), {e}, k, 20000, 22, shifted)[0];
    ASSERT_GT(a.hits, 100u);
    EXPECT_LT(std::abs(a.value - b.value), 3 * std::hypot(a.stderr_, b.stderr_)) << e.describe();
    EXPECT_LT(b.stderr_ / b.value, a.stderr_ / a.value);
  }
}

TEST(Events, BallIsTranslationOfOrigin) {
  const BesovParams p(0.42, 4);
  const auto h = roughldp::testing::random_cm(TimeGrid(16), 2, 3, 0.5);
  const Event at_h = Event::besov_ball(h, 0.7, p);
  const Event at_0 = Event::besov_ball(CameronMartinPath::zeros(TimeGrid(16), 2), 0.7, p);
  for (int s = 0; s < 30; ++s) {
    const SampledPath w = roughldp::testing::random_path(TimeGrid(32), 2, s).scaled(0.3);
    EXPECT_EQ(at_h.contains(w + h.path().refined(TimeGrid(32))), at_0.contains(w));
  }
}

TEST(PathwiseCov, AdditiveIsIdentityAndScanPositive) {
  const auto add = make_system("additive", {{"dim", 2}}).system;
  const auto w = roughldp::testing::random_path(TimeGrid(32), 2, 1);
  const auto c = pathwise_malliavin_cov(add, 0.3, CameronMartinPath::zeros(TimeGrid(32), 2), w, Vec::Zero(2));
  EXPECT_NEAR((c.scaled - Mat::Identity(2, 2)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((c.tau - 0.09 * Mat::Identity(2, 2)).norm(), 0.0, 1e-12);

  const auto lin = make_system("linear1d").system;
  const auto h = CameronMartinPath::linear(TimeGrid(64), Eigen::VectorXd::Ones(1));
  const auto rows = nondegeneracy_scan(lin, h, vec1(1.0), {0.5, 0.25}, 300, 3, 64);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_GT(r.min_eigenvalue, 0.0);
    EXPECT_EQ(r.singular, 0u);
  }
  EXPECT_LT(std::abs(rows[1].mean(0, 0) - std::exp(2.0)), std::abs(rows[0].mean(0, 0) - std::exp(2.0)));
}

TEST(BallDecay, MonotoneAndDilation) {
  const BesovParams p(0.42, 4);
  const auto tables = ball_decay_probe(p, 1, 6, 8, 2000, 5);
  ASSERT_EQ(tables.size(), 2u);
  for (const auto& t : tables) {
    for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_LE(t.rows[i].probability, t.rows[i - 1].probability);
    EXPECT_LT(t.slope, 0.0);
  }
  const auto norms = brownian_ball_norms(p, 1, 6, 500, 6);
  std::vector<double> n1, scaled;
  for (const auto& [a, b] : norms) {
    n1.push_back(a);
    scaled.push_back(0.25 * a);
  }
  const std::vector<double> radii{1.0, 1.5, 2.0};
  const std::vector<double> radii_s{0.25, 0.375, 0.5};
  const auto t1 = ball_decay_from_norms(n1, 1, radii);
  const auto t2 = ball_decay_from_norms(scaled, 1, radii_s);
  for (std::size_t i = 0; i < radii.size(); ++i) EXPECT_EQ(t1.rows[i].hits, t2.rows[i].hits);
}

TEST(FitLine, Exact) {
  const auto [r, s] = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(r, 1.0, 1e-13);
  EXPECT_NEAR(s, 2.0, 1e-13);
}

TEST(LdpSweep, SmallRunDeterministicAndOrdered) {
  auto c = make_system("additive");
  ActionProblem prob(c.system, c.a, c.a_prime);
  prob.n_controls = 32;
  prob.solver_steps = 64;
  const RateResult best = minimize_action(prob);
  LdpSweepConfig cfg;
  cfg.eps_ladder = {0.5, 0.35, 0.25};
  cfg.n_mc = 2000;
  cfg.n_steps = 32;
  cfg.events = standard_events(prob, best, BesovParams(0.42, 4), 1.0, std::nullopt, 0.0);
  const LdpResult a = ldp_sweep(cfg, prob);
  cfg.workers = 2;
  const LdpResult b = ldp_sweep(cfg, prob);
  ASSERT_EQ(a.rows.size(), 6u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].estimate.value, b.rows[i].estimate.value);
  EXPECT_NEAR(a.fit("whole").fitted_rate, -0.5, 0.1);
  EXPECT_LE(a.fit("ball_min").fitted_rate, a.fit("whole").fitted_rate + 0.05);
  EXPECT_THROW(a.fit("missing"), ValidationError);
  cfg.eps_ladder = {0.25, 0.5};
  EXPECT_THROW(ldp_sweep(cfg, prob), ValidationError);
}
