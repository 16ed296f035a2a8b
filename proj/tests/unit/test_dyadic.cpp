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

#include "roughldp/dyadic.hpp"
#include "roughldp/error.hpp"
#include "test_util.hpp"

using namespace roughldp;

TEST(SampleBrownian, VarianceAndDeterminism) {
  const int d = 2;
  const int n = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < n; ++s) {
    const auto fam = sample_brownian(d, 3, s);
    const double v = fam.base().point(8).squaredNorm();
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_LT(std::abs(mean - d), 3 * se);
  EXPECT_EQ(sample_brownian(3, 6, 77).base().values(), sample_brownian(3, 6, 77).base().values());
  EXPECT_NE(sample_brownian(3, 6, 77).base().values(), sample_brownian(3, 6, 78).base().values());
}

TEST(DyadicFamily, LevelZeroIsChordAndAgreesOnNodes) {
  const auto fam = sample_brownian(2, 6, 5);
  const SampledPath w0 = fam.level(0);
  EXPECT_EQ(w0.grid().n_steps(), 1);
  EXPECT_EQ(w0.point(1), fam.base().point(64));
  const SampledPath w3 = fam.level(3);
  for (int l = 0; l <= 8; ++l) EXPECT_EQ(w3.point(l), fam.base().point(8 * l));
}

TEST(MidpointIncrement, TentExample) {
  DyadicFamily fam(1, 1, {0.0, 1.0, 0.0});
  const SampledPath z = midpoint_increment(fam, 0);
  ASSERT_EQ(z.grid().n_steps(), 2);
  EXPECT_DOUBLE_EQ(z(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(z(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(z(2, 0), 0.0);
}

TEST(MidpointIncrement, ZeroOnChordAndMatchesDifference) {
  DyadicFamily chord(1, 2, {0.0, 0.25, 0.5, 0.75, 1.0});
  for (int k = 0; k < 2; ++k) {
    const SampledPath z = midpoint_increment(chord, k);
    for (double v : z.values()) EXPECT_EQ(v, 0.0);
  }
  const auto fam = sample_brownian(3, 8, 12);
  for (int k = 0; k < 8; ++k) {
    const SampledPath z = midpoint_increment(fam, k);
    const SampledPath diff = fam.level(k + 1) - fam.level_on(k, k + 1);
    for (std::size_t i = 0; i < z.values().size(); ++i) {
      EXPECT_NEAR(z.values()[i], diff.values()[i], 1e-15);
    }
    for (int l = 0; l <= (1 << k); ++l) {
      for (int c = 0; c < 3; ++c) EXPECT_EQ(z(2 * l, c), 0.0);
    }
  }
  EXPECT_THROW(midpoint_increment(fam, 8), ValidationError);
}

TEST(Telescoping, ExactSum) {
  const auto fam = sample_brownian(2, 9, 4);
  for (int k = 0; k < 9; k += 2) EXPECT_LT(telescoping_residual(fam, k, 9), 1e-13);
}

TEST(Level2Decomposition, ResidualVanishes) {
  for (int d = 1; d <= 3; ++d) {
    const auto fam = sample_brownian(d, 6, 30 + d);
    for (int k = 0; k <= 5; ++k) EXPECT_LT(level2_decomposition_check(fam, k), 1e-12);
  }
  const SampledPath x = roughldp::testing::random_path(TimeGrid(16), 2, 9);
  EXPECT_EQ(level2_decomposition_residual(x, x), 0.0);
}

TEST(DecayExperiment, BoundsAndGates) {
  EXPECT_NEAR(decay_slope_bound(BesovParams(0.42, 4)), -0.78, 1e-12);
  EXPECT_THROW(decay_experiment(BesovParams::unchecked(0.49, 1), 2, 4, 10, 1, 1), ValidationError);
  EXPECT_THROW(decay_experiment(BesovParams(0.42, 4), 5, 3, 10, 1, 1), ValidationError);
}

TEST(DecayExperiment, SmallRunDeterministicAndDecaying) {
  const BesovParams p(0.42, 4);
  const auto a = decay_experiment(p, 2, 6, 60, 1, 9);
  const auto b = decay_experiment(p, 2, 6, 60, 1, 9, 2);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].estimate, b.rows[i].estimate);
  EXPECT_TRUE(a.insufficient_samples);
  EXPECT_LT(a.fit(kStatLevel1).slope, 0.0);
  EXPECT_NEAR(a.fit(kStatLevel1).bound, -0.78, 1e-12);
  EXPECT_TRUE(std::isnan(a.fit(kStatJzz).bound));
}

TEST(IncrementMoment, ConstantBelowFourD) {
  for (int d : {1, 2}) {
    const auto r = increment_moment_check(d, 3, 4000, 17);
    EXPECT_LE(r.fitted_constant, 4.0 * d);
    EXPECT_GT(r.fitted_constant, 0.0);
  }
}

TEST(PathwiseCauchy, MatchesDirectDistance) {
  const auto fam = sample_brownian(2, 7, 2);
  const BesovParams p(0.42, 4);
  const auto dist = pathwise_cauchy(fam, p);
  ASSERT_EQ(dist.size(), 7u);
  for (int k = 0; k < 7; ++k) {
    const double direct = besov_distance(lift_piecewise_linear(fam.level_on(k + 1, 7)),
                                         lift_piecewise_linear(fam.level_on(k, 7)), p);
    EXPECT_DOUBLE_EQ(dist[k], direct);
    EXPECT_GT(dist[k], 0.0);
  }
}
