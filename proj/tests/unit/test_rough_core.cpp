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
#include <random>

#include "roughldp/error.hpp"
#include "roughldp/rough_core.hpp"
#include "test_util.hpp"

using namespace roughldp;
using roughldp::testing::random_path;
using roughldp::testing::random_cm;

TEST(TimeGrid, IndexAndRefinement) {
  TimeGrid g(8);
  EXPECT_EQ(g.index_of(0.25), 2);
  EXPECT_THROW(g.index_of(0.3), ValidationError);
  EXPECT_EQ(g.refinement_factor(TimeGrid(32)), 4);
  EXPECT_THROW(g.refinement_factor(TimeGrid(12)), ValidationError);
  EXPECT_EQ(TimeGrid(4).common_refinement(TimeGrid(6)).n_steps(), 12);
  EXPECT_TRUE(TimeGrid::dyadic(5).is_dyadic());
}

TEST(Lift, SingleSegmentLine) {
  Eigen::VectorXd v(2);
  v << 1.5, -2.0;
  const auto x = lift_piecewise_linear(
      SampledPath::from_function(TimeGrid(1), 2, [&](double t) -> Eigen::VectorXd { return t * v; }));
  const GroupElement g = x.increment(0, 1);
  EXPECT_NEAR((g.a1 - v).norm(), 0.0, 1e-15);
  EXPECT_NEAR((g.a2 - 0.5 * v * v.transpose()).norm(), 0.0, 1e-15);
}

TEST(Lift, LevyAreaOfCorner) {
  SampledPath p(TimeGrid(2), 2, {0, 0, 1, 0, 1, 1});
  const GroupElement g = lift_piecewise_linear(p).increment(0, 2);
  Eigen::MatrixXd expect(2, 2);
  expect << 0.5, 1.0, 0.0, 0.5;
  EXPECT_NEAR((g.a2 - expect).norm(), 0.0, 1e-15);
  EXPECT_NEAR(0.5 * (g.a2(0, 1) - g.a2(1, 0)), 0.5, 1e-15);
}

TEST(Lift, ConcatenationIsChen) {
  const SampledPath p = random_path(TimeGrid(16), 3, 11);
  const auto x = lift_piecewise_linear(p);
  const GroupElement whole = x.increment(0.0, 1.0);
  const GroupElement joined = chen_compose(x.increment(0.0, 0.5), x.increment(0.5, 1.0));
  EXPECT_NEAR((whole.a1 - joined.a1).norm(), 0.0, 1e-12);
  EXPECT_NEAR((whole.a2 - joined.a2).norm(), 0.0, 1e-12);
}

TEST(Group, UnitInverseAndTensorProduct) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  GroupElement g{Eigen::VectorXd(3), Eigen::MatrixXd(3, 3)};
  for (int i = 0; i < 3; ++i) g.a1(i) = n01(rng);
  for (int i = 0; i < 9; ++i) g.a2(i) = n01(rng);
  const GroupElement e = GroupElement::identity(3);
  const GroupElement ge = chen_compose(g, e);
  EXPECT_EQ((ge.a1 - g.a1).norm(), 0.0);
  EXPECT_EQ((ge.a2 - g.a2).norm(), 0.0);
  const GroupElement gi = chen_compose(g, g.inverse());
  EXPECT_NEAR(gi.a1.norm() + gi.a2.norm(), 0.0, 1e-14);

  GroupElement l{Eigen::Vector2d(1, 0), Eigen::Matrix2d::Zero()};
  GroupElement r{Eigen::Vector2d(0, 1), Eigen::Matrix2d::Zero()};
  const GroupElement lr = chen_compose(l, r);
  EXPECT_EQ(lr.a2(0, 1), 1.0);
  EXPECT_EQ(lr.a2(1, 0), 0.0);
}

TEST(Group, MembershipPreserved) {
  const auto x = lift_piecewise_linear(random_path(TimeGrid(8), 2, 5));
  const GroupElement a = x.increment(0, 3), b = x.increment(3, 8);
  EXPECT_LT(a.geometric_defect(), 1e-14);
  EXPECT_LT(chen_compose(a, b).geometric_defect(), 1e-13);
  EXPECT_LT(a.inverse().geometric_defect(), 1e-14);
}

TEST(Group, ChenAssociativity) {
  const auto x = lift_piecewise_linear(random_path(TimeGrid(12), 2, 9));
  const auto p = x.increment(0, 3), q = x.increment(3, 7), r = x.increment(7, 12);
  const auto left = chen_compose(chen_compose(p, q), r);
  const auto right = chen_compose(p, chen_compose(q, r));
  EXPECT_NEAR((left.a1 - right.a1).norm(), 0.0, 1e-14);
  EXPECT_NEAR((left.a2 - right.a2).norm(), 0.0, 1e-14);
}

TEST(ChenDefect, ZeroOnStoredPaths) {
  const auto x = lift_piecewise_linear(random_path(TimeGrid(16), 3, 1));
  EXPECT_LT(chen_defect(x, 0.125, 0.5, 0.875), 1e-12);
  EXPECT_LT(max_chen_defect(x), 1e-12);
  EXPECT_THROW(chen_defect(x, 0.1, 0.5, 0.9), ValidationError);
}

TEST(ChenDefect, PerturbationGivesItsSize) {
  const auto x = lift_piecewise_linear(random_path(TimeGrid(4), 2, 2));
  RoughPathTable table(x);
  GroupElement cell = table.at(1, 2);
  Eigen::MatrixXd e(2, 2);
  e << 0.0, 0.3, -0.4, 0.0;
  cell.a2 += e;
  table.set(1, 2, cell);
  EXPECT_NEAR(chen_defect(table, 0.0, 0.25, 0.5), e.norm(), 1e-12);
  EXPECT_NEAR(chen_defect(table, 0.0, 0.5, 1.0), 0.0, 1e-12);
}

TEST(GeometricDefect, Examples) {
  EXPECT_LT(geometric_defect(lift_piecewise_linear(random_path(TimeGrid(32), 3, 4))), 1e-12);
  GroupElement area{Eigen::Vector2d::Zero(), Eigen::Matrix2d()};
  area.a2 << 0.0, 0.7, -0.7, 0.0;
  EXPECT_EQ(area.geometric_defect(), 0.0);
  GroupElement id{Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()};
  EXPECT_EQ(id.geometric_defect(), 2.0);
}

TEST(HomogeneousNorm, Examples) {
  EXPECT_EQ(homogeneous_norm(GroupElement::identity(3)), 0.0);
  GroupElement u{Eigen::Vector2d(1, 0), Eigen::Matrix2d::Zero()};
  EXPECT_EQ(homogeneous_norm(u), 1.0);
  const auto g = lift_piecewise_linear(random_path(TimeGrid(8), 2, 6)).increment(0, 8);
  for (double lam : {-2.0, 0.5, 3.0}) {
    EXPECT_NEAR(homogeneous_norm(g.dilated(lam)), std::abs(lam) * homogeneous_norm(g), 1e-12);
  }
}

TEST(Dilate, Examples) {
  const SampledPath p = random_path(TimeGrid(16), 2, 7);
  const auto x = lift_piecewise_linear(p);
  const auto same = dilate(x, 1.0);
  EXPECT_EQ(same.first_cells(), x.first_cells());
  EXPECT_EQ(same.second_cells(), x.second_cells());
  const auto zero = dilate(x, 0.0);
  for (double v : zero.second_cells()) EXPECT_EQ(v, 0.0);
  const auto neg = dilate(x, -1.0);
  const auto lift_neg = lift_piecewise_linear(p.scaled(-1.0));
  for (int i = 0; i <= 16; ++i) {
    for (int j = i; j <= 16; ++j) {
      const auto a = neg.increment(i, j), b = lift_neg.increment(i, j);
      EXPECT_NEAR((a.a1 - b.a1).norm() + (a.a2 - b.a2).norm(), 0.0, 1e-13);
    }
  }
}

TEST(YoungTranslate, ZeroShiftAndTranslationIdentity) {
  const TimeGrid g(32);
  const SampledPath w = random_path(g, 2, 21);
  const auto x = lift_piecewise_linear(w);
  const auto t0 = young_translate(x, CameronMartinPath::zeros(g, 2));
  for (int i = 0; i <= 32; i += 4) {
    for (int j = i; j <= 32; j += 4) {
      const auto a = t0.increment(i, j), b = x.increment(i, j);
      EXPECT_NEAR((a.a1 - b.a1).norm() + (a.a2 - b.a2).norm(), 0.0, 1e-14);
    }
  }
  const CameronMartinPath h = random_cm(TimeGrid(8), 2, 22);
  const auto th = young_translate(x, h);
  const auto direct = lift_piecewise_linear(w + h.path().refined(g));
  double worst = 0.0;
  for (int i = 0; i <= 32; ++i) {
    for (int j = i; j <= 32; ++j) {
      const auto a = th.increment(i, j), b = direct.increment(i, j);
      worst = std::max(worst, (a.a1 - b.a1).norm() + (a.a2 - b.a2).norm());
    }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(YoungTranslate, OneDimensionalStaysGeometric) {
  const auto x = lift_piecewise_linear(random_path(TimeGrid(16), 1, 3));
  const auto th = young_translate(x, random_cm(TimeGrid(16), 1, 4));
  for (int j = 1; j <= 16; ++j) {
    const auto g = th.increment(0, j);
    EXPECT_NEAR(g.a2(0, 0), 0.5 * g.a1(0) * g.a1(0), 1e-13);
  }
}

TEST(YoungTranslate, FlowProperty) {
  const TimeGrid g(16);
  const auto x = lift_piecewise_linear(random_path(g, 2, 30));
  const auto h1 = random_cm(g, 2, 31), h2 = random_cm(g, 2, 32);
  const auto lhs = young_translate(young_translate(x, h2), h1);
  const auto rhs = young_translate(x, h1 + h2);
  for (int i = 0; i <= 16; ++i) {
    for (int j = i; j <= 16; ++j) {
      const auto a = lhs.increment(i, j), b = rhs.increment(i, j);
      EXPECT_NEAR((a.a1 - b.a1).norm() + (a.a2 - b.a2).norm(), 0.0, 1e-10);
    }
  }
}

TEST(YoungPair, Examples) {
  const auto zero = young_pair(lift_piecewise_linear(SampledPath::zeros(TimeGrid(8), 1)));
  EXPECT_NEAR(zero.increment(0, 8).a2(1, 1), 0.5, 1e-15);

  Eigen::VectorXd v(2);
  v << 2.0, -1.0;
  const auto line = young_pair(lift_piecewise_linear(SampledPath::from_function(
      TimeGrid(4), 2, [&](double t) -> Eigen::VectorXd { return t * v; })));
  const GroupElement g = line.increment(0, 4);
  // int_0^1 (x_u - x_0) du sits in the (x, t) block
  EXPECT_NEAR(g.a2(0, 2), v(0) / 2, 1e-14);
  EXPECT_NEAR(g.a2(1, 2), v(1) / 2, 1e-14);
  EXPECT_NEAR(g.a2(2, 0), v(0) / 2, 1e-14);
  EXPECT_LT(geometric_defect(young_pair(lift_piecewise_linear(random_path(TimeGrid(16), 2, 8)))),
            1e-13);
}

TEST(CrossIntegral, Identities) {
  const TimeGrid g(16);
  const SampledPath x = random_path(g, 2, 40), y = random_path(g, 2, 41);
  const auto jxx = cross_integral(x, x);
  const auto lx = lift_piecewise_linear(x);
  for (int i = 0; i <= 16; ++i) {
    for (int j = i; j <= 16; ++j) {
      EXPECT_NEAR((jxx.value(i, j) - lx.increment(i, j).a2).norm(), 0.0, 1e-13);
      // integration by parts: J[x,y] + J[y,x]^T = X^1 (x) Y^1
      const Eigen::VectorXd dx = x.point(j) - x.point(i), dy = y.point(j) - y.point(i);
      const Eigen::MatrixXd ibp =
          cross_integral(x, y).value(i, j) + cross_integral(y, x).value(i, j).transpose();
      EXPECT_NEAR((ibp - dx * dy.transpose()).norm(), 0.0, 1e-13);
    }
  }
  const SampledPath c(g, 2, std::vector<double>(34, 1.25));
  EXPECT_EQ(cross_integral(x, c).value(0, 16).norm(), 0.0);
  EXPECT_THROW(cross_integral(x, random_path(TimeGrid(8), 2, 1)), ValidationError);
}

TEST(CrossIntegral, Bilinear) {
  const TimeGrid g(16);
  const SampledPath x1 = random_path(g, 2, 1), x2 = random_path(g, 2, 2), y = random_path(g, 2, 3);
  const auto lhs = cross_integral(x1.scaled(2.0) + x2.scaled(-0.5), y);
  const auto a = cross_integral(x1, y), b = cross_integral(x2, y);
  const auto rhs_r = cross_integral(y, x1.scaled(3.0) + x2);
  const auto c = cross_integral(y, x1), e = cross_integral(y, x2);
  for (int i = 0; i <= 16; ++i) {
    for (int j = i; j <= 16; ++j) {
      EXPECT_NEAR((lhs.value(i, j) - 2.0 * a.value(i, j) + 0.5 * b.value(i, j)).norm(), 0.0,
                  1e-12);
      EXPECT_NEAR((rhs_r.value(i, j) - 3.0 * c.value(i, j) - e.value(i, j)).norm(), 0.0, 1e-12);
    }
  }
}

TEST(ShuffleIdentity, RandomPolygons) {
  for (int d = 1; d <= 3; ++d) {
    for (int s = 0; s < 50; ++s) {
      const auto x = lift_piecewise_linear(random_path(TimeGrid(12), d, 1000 * d + s));
      ASSERT_LT(geometric_defect(x), 1e-12);
    }
  }
}

TEST(Refinement, LiftCommutesWithRefine) {
  const SampledPath p = random_path(TimeGrid(8), 2, 55);
  const auto a = lift_piecewise_linear(p).refined(TimeGrid(32));
  const auto b = lift_piecewise_linear(p.refined(TimeGrid(32)));
  for (int i = 0; i <= 32; ++i) {
    for (int j = i; j <= 32; ++j) {
      const auto u = a.increment(i, j), v = b.increment(i, j);
      EXPECT_NEAR((u.a1 - v.a1).norm() + (u.a2 - v.a2).norm(), 0.0, 1e-13);
    }
  }
}

TEST(CameronMartin, EnergyAndPath) {
  const TimeGrid g(4);
  CameronMartinPath h(g, 1, {1.0, -1.0, 2.0, 0.0});
  EXPECT_DOUBLE_EQ(h.norm_sq(), (1.0 + 1.0 + 4.0) * 0.25);
  EXPECT_DOUBLE_EQ(h.energy(), 0.75);
  EXPECT_NEAR(h.endpoint()(0), 0.5, 1e-15);
  EXPECT_TRUE(h.path().is_based());
  EXPECT_THROW(CameronMartinPath(g, 1, {1.0, NAN, 0.0, 0.0}), ValidationError);
}
