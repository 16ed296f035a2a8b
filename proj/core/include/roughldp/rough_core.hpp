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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "roughldp/types.hpp"

namespace roughldp {

/// Uniform partition t_i = i / n_steps of [0, 1].
class TimeGrid {
 public:
  explicit TimeGrid(int n_steps);

  /// Grid with 2^level cells.
  static TimeGrid dyadic(int level);

  int n_steps() const noexcept { return n_steps_; }
  int n_nodes() const noexcept { return n_steps_ + 1; }
  double dt() const noexcept { return 1.0 / n_steps_; }
  double time(int i) const noexcept {
    return static_cast<double>(i) / n_steps_;
  }
  bool is_dyadic() const noexcept { return (n_steps_ & (n_steps_ - 1)) == 0; }

  /// Index of grid time t. Off-grid times throw ValidationError.
  int index_of(double t) const;

  /// Number of fine cells per cell of *this; throws unless `finer` nests it.
  int refinement_factor(const TimeGrid& finer) const;

  /// Coarsest grid containing both (lcm of the cell counts).
  TimeGrid common_refinement(const TimeGrid& other) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  int n_steps_;
};

/// R^d-valued path sampled at every node of a TimeGrid, read as the
/// piecewise-linear interpolant of its samples.
class SampledPath {
 public:
  SampledPath(TimeGrid grid, int dim, std::vector<double> values);

  static SampledPath zeros(TimeGrid grid, int dim);
  static SampledPath from_function(
      TimeGrid grid, int dim,
      const std::function<Eigen::VectorXd(double)>& fn);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }

  std::span<const double> at(int i) const {
    return {values_.data() + static_cast<std::size_t>(i) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  double operator()(int i, int k) const {
    return values_[static_cast<std::size_t>(i) * dim_ + k];
  }
  Eigen::VectorXd point(int i) const;
  const std::vector<double>& values() const noexcept { return values_; }

  /// Linear interpolation onto a nesting finer grid (exact for polygons).
  SampledPath refined(const TimeGrid& finer) const;
  /// Subsample onto a coarser grid nested in this one.
  SampledPath coarsened(const TimeGrid& coarser) const;

  SampledPath scaled(double lambda) const;
  SampledPath operator+(const SampledPath& other) const;
  SampledPath operator-(const SampledPath& other) const;

  /// values[0] == 0.
  bool is_based(double tol = 0.0) const;

 private:
  TimeGrid grid_;
  int dim_;
  std::vector<double> values_;
};

/// Piecewise-linear Cameron-Martin path: h' constant on each cell, h_0 = 0.
class CameronMartinPath {
 public:
  CameronMartinPath(TimeGrid grid, int dim, std::vector<double> derivative);

  static CameronMartinPath zeros(TimeGrid grid, int dim);
  /// Straight line h_t = t * endpoint.
  static CameronMartinPath linear(TimeGrid grid,
                                  const Eigen::VectorXd& endpoint);
  /// Increments of a sampled path divided by dt (the offset x_0 is dropped).
  static CameronMartinPath from_path(const SampledPath& path);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }

  std::span<const double> derivative(int cell) const {
    return {derivative_.data() + static_cast<std::size_t>(cell) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  const std::vector<double>& derivatives() const noexcept {
    return derivative_;
  }

  /// ||h||_H^2 = sum |h'_i|^2 dt.
  double norm_sq() const;
  /// ||h||_H^2 / 2.
  double energy() const { return 0.5 * norm_sq(); }

  SampledPath path() const;
  Eigen::VectorXd endpoint() const;
  CameronMartinPath refined(const TimeGrid& finer) const;
  CameronMartinPath scaled(double lambda) const;
  CameronMartinPath operator+(const CameronMartinPath& other) const;
  CameronMartinPath operator-(const CameronMartinPath& other) const;

 private:
  TimeGrid grid_;
  int dim_;
  std::vector<double> derivative_;
};

/// Element (1, a1, a2) of the step-2 truncated tensor algebra.
struct GroupElement {
  Eigen::VectorXd a1;
  Eigen::MatrixXd a2;

  static GroupElement identity(int dim);

  int dim() const { return static_cast<int>(a1.size()); }
  GroupElement inverse() const;
  /// (1, lambda a1, lambda^2 a2).
  GroupElement dilated(double lambda) const;
  /// Distance of a2 + a2^T from a1 a1^T (max entry); zero on G^2(R^d).
  double geometric_defect() const;
};

/// Truncated tensor product; Chen's relation X_{s,t} = X_{s,u} (x) X_{u,t}.
GroupElement chen_compose(const GroupElement& left, const GroupElement& right);

/// |a1| + sqrt(|a2|_F), equivalent to the Carnot-Caratheodory norm.
double homogeneous_norm(const GroupElement& g);

/// Step-2 rough path stored as per-cell increments.
///
/// Increments between arbitrary grid nodes come from the prefix products
/// X_{0,t_i}: X_{s,t} = X_{0,s}^{-1} (x) X_{0,t}, precomputed in O(n) and
/// evaluated in O(d^2) per query. Second-level norms are Frobenius.
class Level2RoughPath {
 public:
  Level2RoughPath(TimeGrid grid, int dim, std::vector<double> first_cells,
                  std::vector<double> second_cells);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }

  GroupElement cell(int i) const;
  /// X_{t_i, t_j}, i <= j.
  GroupElement increment(int i, int j) const;
  /// X_{s,t} for grid times s <= t; off-grid times throw.
  GroupElement increment(double s, double t) const;

  /// X^1_{t_i,t_j} written into out (size dim).
  void first(int i, int j, std::span<double> out) const;
  /// X^2_{t_i,t_j} row-major into out (size dim*dim).
  void second(int i, int j, std::span<double> out) const;
  double first_sq_norm(int i, int j) const;
  double second_sq_norm(int i, int j) const;

  const std::vector<double>& first_cells() const noexcept {
    return first_cells_;
  }
  const std::vector<double>& second_cells() const noexcept {
    return second_cells_;
  }

  /// Path x_t = X^1_{0,t}.
  SampledPath trace() const;

  /// Split every cell into equal sub-cells whose composition reproduces the
  /// cell; geometric cells stay geometric and lifts map to lifts.
  Level2RoughPath refined(const TimeGrid& finer) const;

 private:
  const double* prefix1(int i) const {
    return prefix1_.data() + static_cast<std::size_t>(i) * dim_;
  }
  const double* prefix2(int i) const {
    return prefix2_.data() + static_cast<std::size_t>(i) * dim_ * dim_;
  }

  TimeGrid grid_;
  int dim_;
  std::vector<double> first_cells_;
  std::vector<double> second_cells_;
  std::vector<double> prefix1_;
  std::vector<double> prefix2_;
};

/// Dense table of X_{s,t} over all grid pairs. Unlike Level2RoughPath it can
/// hold two-parameter data that violates Chen's relation.
class RoughPathTable {
 public:
  explicit RoughPathTable(const Level2RoughPath& path);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }
  const GroupElement& at(int i, int j) const { return table_[index(i, j)]; }
  void set(int i, int j, GroupElement value) {
    table_[index(i, j)] = std::move(value);
  }

 private:
  std::size_t index(int i, int j) const;

  TimeGrid grid_;
  int dim_;
  std::vector<GroupElement> table_;
};

/// Exact lift S_2 of the polygon through the samples.
Level2RoughPath lift_piecewise_linear(const SampledPath& path);

/// |X_{s,t} - X_{s,u} (x) X_{u,t}|, first level Euclidean plus second level
/// Frobenius. The stored-cell overload compares the prefix-product route
/// against a direct left fold of the cells.
double chen_defect(const Level2RoughPath& x, double s, double u, double t);
double chen_defect(const RoughPathTable& x, double s, double u, double t);
/// Largest Chen defect over every grid triple.
double max_chen_defect(const Level2RoughPath& x);

/// max over grid pairs of max_{i,j} |X^{2;ij} + X^{2;ji} - X^{1;i} X^{1;j}|.
double geometric_defect(const Level2RoughPath& x);

Level2RoughPath dilate(const Level2RoughPath& x, double lambda);

/// Young translation T_h X: (X^1 + H^1, X^2 + H^2 + J[x,h] + J[h,x]).
/// Operands on different grids are refined to their common refinement.
Level2RoughPath young_translate(const Level2RoughPath& x,
                                const CameronMartinPath& h);

/// Pairing with lambda_t = t, appended as coordinate d+1.
Level2RoughPath young_pair(const Level2RoughPath& x);

/// Two-parameter cross integral J[x,y]_{s,t} = int_s^t (x_u - x_s) (x) dy_u
/// for polygons x, y on a common grid, evaluated exactly.
class CrossIntegral {
 public:
  CrossIntegral(const SampledPath& x, const SampledPath& y);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }

  /// J[x,y]_{t_i,t_j} row-major into out (size dim*dim).
  void value(int i, int j, std::span<double> out) const;
  Eigen::MatrixXd value(int i, int j) const;
  double sq_norm(int i, int j) const;

 private:
  TimeGrid grid_;
  int dim_;
  std::vector<double> x_;  // x_t - x_0
  std::vector<double> y_;
  std::vector<double> prefix_;  // J[x,y]_{0,t_i}
};

CrossIntegral cross_integral(const SampledPath& x, const SampledPath& y);

}  // namespace roughldp
