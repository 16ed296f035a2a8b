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

#include "roughldp/rough_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "roughldp/error.hpp"

namespace roughldp {

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid::TimeGrid(int n_steps) : n_steps_(n_steps) {
  if (n_steps <= 0) {
    throw ValidationError("TimeGrid: n_steps must be positive, got " +
                          std::to_string(n_steps));
  }
}

TimeGrid TimeGrid::dyadic(int level) {
  if (level < 0 || level > 24) {
    throw ValidationError("TimeGrid::dyadic: level out of range");
  }
  return TimeGrid(1 << level);
}

int TimeGrid::index_of(double t) const {
  const double scaled = t * n_steps_;
  const double nearest = std::round(scaled);
  if (std::abs(scaled - nearest) > 1e-9 || nearest < 0 || nearest > n_steps_) {
    throw ValidationError("time " + std::to_string(t) +
                          " is not a node of the grid with " +
                          std::to_string(n_steps_) + " cells");
  }
  return static_cast<int>(nearest);
}

int TimeGrid::refinement_factor(const TimeGrid& finer) const {
  if (finer.n_steps_ % n_steps_ != 0) {
    throw ValidationError("grid with " + std::to_string(finer.n_steps_) +
                          " cells does not refine grid with " +
                          std::to_string(n_steps_) + " cells");
  }
  return finer.n_steps_ / n_steps_;
}

TimeGrid TimeGrid::common_refinement(const TimeGrid& other) const {
  const long long l = std::lcm(static_cast<long long>(n_steps_),
                               static_cast<long long>(other.n_steps_));
  if (l > (1LL << 24)) {
    throw ValidationError("common grid refinement is too large");
  }
  return TimeGrid(static_cast<int>(l));
}

// ---------------------------------------------------------------------------
// SampledPath

SampledPath::SampledPath(TimeGrid grid, int dim, std::vector<double> values)
    : grid_(grid), dim_(dim), values_(std::move(values)) {
  if (dim <= 0) throw ValidationError("SampledPath: dimension must be positive");
  if (values_.size() != static_cast<std::size_t>(grid_.n_nodes()) * dim_) {
    throw ValidationError("SampledPath: expected " +
                          std::to_string(grid_.n_nodes() * dim_) +
                          " values, got " + std::to_string(values_.size()));
  }
}

SampledPath SampledPath::zeros(TimeGrid grid, int dim) {
  return SampledPath(grid, dim,
                     std::vector<double>(
                         static_cast<std::size_t>(grid.n_nodes()) * dim, 0.0));
}

SampledPath SampledPath::from_function(
    TimeGrid grid, int dim, const std::function<Eigen::VectorXd(double)>& fn) {
  std::vector<double> v(static_cast<std::size_t>(grid.n_nodes()) * dim);
  for (int i = 0; i < grid.n_nodes(); ++i) {
    const Eigen::VectorXd p = fn(grid.time(i));
    if (p.size() != dim) {
      throw ValidationError("SampledPath::from_function: wrong dimension");
    }
    for (int k = 0; k < dim; ++k) v[static_cast<std::size_t>(i) * dim + k] = p(k);
  }
  return SampledPath(grid, dim, std::move(v));
}

Eigen::VectorXd SampledPath::point(int i) const {
  Eigen::VectorXd p(dim_);
  for (int k = 0; k < dim_; ++k) p(k) = (*this)(i, k);
  return p;
}

SampledPath SampledPath::refined(const TimeGrid& finer) const {
  const int r = grid_.refinement_factor(finer);
  if (r == 1) return *this;
  std::vector<double> v(static_cast<std::size_t>(finer.n_nodes()) * dim_);
  for (int i = 0; i < finer.n_nodes(); ++i) {
    const int cell = std::min(i / r, grid_.n_steps() - 1);
    const double frac = static_cast<double>(i - cell * r) / r;
    for (int k = 0; k < dim_; ++k) {
      const double lo = (*this)(cell, k);
      const double hi = (*this)(cell + 1, k);
      v[static_cast<std::size_t>(i) * dim_ + k] = lo + frac * (hi - lo);
    }
  }
  return SampledPath(finer, dim_, std::move(v));
}

SampledPath SampledPath::coarsened(const TimeGrid& coarser) const {
  const int r = coarser.refinement_factor(grid_);
  std::vector<double> v(static_cast<std::size_t>(coarser.n_nodes()) * dim_);
  for (int i = 0; i < coarser.n_nodes(); ++i) {
    for (int k = 0; k < dim_; ++k) {
      v[static_cast<std::size_t>(i) * dim_ + k] = (*this)(i * r, k);
    }
  }
  return SampledPath(coarser, dim_, std::move(v));
}

SampledPath SampledPath::scaled(double lambda) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= lambda;
  return SampledPath(grid_, dim_, std::move(v));
}

SampledPath SampledPath::operator+(const SampledPath& other) const {
  if (!(grid_ == other.grid_) || dim_ != other.dim_) {
    throw ValidationError("SampledPath +: grid or dimension mismatch");
  }
  std::vector<double> v = values_;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
  return SampledPath(grid_, dim_, std::move(v));
}

SampledPath SampledPath::operator-(const SampledPath& other) const {
  return *this + other.scaled(-1.0);
}

bool SampledPath::is_based(double tol) const {
  for (int k = 0; k < dim_; ++k) {
    if (std::abs(values_[k]) > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// CameronMartinPath

CameronMartinPath::CameronMartinPath(TimeGrid grid, int dim,
                                     std::vector<double> derivative)
    : grid_(grid), dim_(dim), derivative_(std::move(derivative)) {
  if (dim <= 0) {
    throw ValidationError("CameronMartinPath: dimension must be positive");
  }
  if (derivative_.size() != static_cast<std::size_t>(grid_.n_steps()) * dim_) {
    throw ValidationError("CameronMartinPath: expected " +
                          std::to_string(grid_.n_steps() * dim_) +
                          " derivative values, got " +
                          std::to_string(derivative_.size()));
  }
  for (double x : derivative_) {
    if (!std::isfinite(x)) {
      throw ValidationError("CameronMartinPath: non-finite derivative");
    }
  }
}

CameronMartinPath CameronMartinPath::zeros(TimeGrid grid, int dim) {
  return CameronMartinPath(
      grid, dim,
      std::vector<double>(static_cast<std::size_t>(grid.n_steps()) * dim, 0.0));
}

CameronMartinPath CameronMartinPath::linear(TimeGrid grid,
                                            const Eigen::VectorXd& endpoint) {
  const int dim = static_cast<int>(endpoint.size());
  std::vector<double> d(static_cast<std::size_t>(grid.n_steps()) * dim);
  for (int i = 0; i < grid.n_steps(); ++i) {
    for (int k = 0; k < dim; ++k) d[static_cast<std::size_t>(i) * dim + k] = endpoint(k);
  }
  return CameronMartinPath(grid, dim, std::move(d));
}

CameronMartinPath CameronMartinPath::from_path(const SampledPath& path) {
  const TimeGrid& g = path.grid();
  const int dim = path.dim();
  std::vector<double> d(static_cast<std::size_t>(g.n_steps()) * dim);
  for (int i = 0; i < g.n_steps(); ++i) {
    for (int k = 0; k < dim; ++k) {
      d[static_cast<std::size_t>(i) * dim + k] =
          (path(i + 1, k) - path(i, k)) * g.n_steps();
    }
  }
  return CameronMartinPath(g, dim, std::move(d));
}

double CameronMartinPath::norm_sq() const {
  double s = 0.0;
  for (double x : derivative_) s += x * x;
  return s * grid_.dt();
}

SampledPath CameronMartinPath::path() const {
  std::vector<double> v(static_cast<std::size_t>(grid_.n_nodes()) * dim_, 0.0);
  const double dt = grid_.dt();
  for (int i = 0; i < grid_.n_steps(); ++i) {
    for (int k = 0; k < dim_; ++k) {
      v[static_cast<std::size_t>(i + 1) * dim_ + k] =
          v[static_cast<std::size_t>(i) * dim_ + k] +
          derivative_[static_cast<std::size_t>(i) * dim_ + k] * dt;
    }
  }
  return SampledPath(grid_, dim_, std::move(v));
}

Eigen::VectorXd CameronMartinPath::endpoint() const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim_);
  for (int i = 0; i < grid_.n_steps(); ++i) {
    for (int k = 0; k < dim_; ++k) e(k) += derivative_[static_cast<std::size_t>(i) * dim_ + k];
  }
  return e * grid_.dt();
}

CameronMartinPath CameronMartinPath::refined(const TimeGrid& finer) const {
  const int r = grid_.refinement_factor(finer);
  if (r == 1) return *this;
  std::vector<double> d(static_cast<std::size_t>(finer.n_steps()) * dim_);
  for (int i = 0; i < finer.n_steps(); ++i) {
    for (int k = 0; k < dim_; ++k) {
      d[static_cast<std::size_t>(i) * dim_ + k] =
          derivative_[static_cast<std::size_t>(i / r) * dim_ + k];
    }
  }
  return CameronMartinPath(finer, dim_, std::move(d));
}

CameronMartinPath CameronMartinPath::scaled(double lambda) const {
  std::vector<double> d = derivative_;
  for (double& x : d) x *= lambda;
  return CameronMartinPath(grid_, dim_, std::move(d));
}

CameronMartinPath CameronMartinPath::operator+(
    const CameronMartinPath& other) const {
  if (dim_ != other.dim_) {
    throw ValidationError("CameronMartinPath +: dimension mismatch");
  }
  const TimeGrid g = grid_.common_refinement(other.grid_);
  CameronMartinPath a = refined(g);
  const CameronMartinPath b = other.refined(g);
  for (std::size_t i = 0; i < a.derivative_.size(); ++i) {
    a.derivative_[i] += b.derivative_[i];
  }
  return a;
}

CameronMartinPath CameronMartinPath::operator-(
    const CameronMartinPath& other) const {
  return *this + other.scaled(-1.0);
}

// ---------------------------------------------------------------------------
// GroupElement

GroupElement GroupElement::identity(int dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
}

GroupElement GroupElement::inverse() const {
  return {-a1, a1 * a1.transpose() - a2};
}

GroupElement GroupElement::dilated(double lambda) const {
  return {lambda * a1, lambda * lambda * a2};
}

double GroupElement::geometric_defect() const {
  return (a2 + a2.transpose() - a1 * a1.transpose()).cwiseAbs().maxCoeff();
}

GroupElement chen_compose(const GroupElement& left, const GroupElement& right) {
  if (left.dim() != right.dim()) {
    throw ValidationError("chen_compose: dimension mismatch");
  }
  return {left.a1 + right.a1,
          left.a2 + right.a2 + left.a1 * right.a1.transpose()};
}

double homogeneous_norm(const GroupElement& g) {
  return g.a1.norm() + std::sqrt(g.a2.norm());
}

// ---------------------------------------------------------------------------
// Level2RoughPath

Level2RoughPath::Level2RoughPath(TimeGrid grid, int dim,
                                 std::vector<double> first_cells,
                                 std::vector<double> second_cells)
    : grid_(grid),
      dim_(dim),
      first_cells_(std::move(first_cells)),
      second_cells_(std::move(second_cells)) {
  const std::size_t n = static_cast<std::size_t>(grid_.n_steps());
  const std::size_t d = static_cast<std::size_t>(dim_);
  if (dim <= 0) {
    throw ValidationError("Level2RoughPath: dimension must be positive");
  }
  if (first_cells_.size() != n * d || second_cells_.size() != n * d * d) {
    throw ValidationError("Level2RoughPath: cell arrays have wrong size");
  }
  prefix1_.assign((n + 1) * d, 0.0);
  prefix2_.assign((n + 1) * d * d, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    const double* a1 = prefix1_.data() + c * d;
    const double* a2 = prefix2_.data() + c * d * d;
    const double* c1 = first_cells_.data() + c * d;
    const double* c2 = second_cells_.data() + c * d * d;
    double* b1 = prefix1_.data() + (c + 1) * d;
    double* b2 = prefix2_.data() + (c + 1) * d * d;
    for (std::size_t p = 0; p < d; ++p) {
      b1[p] = a1[p] + c1[p];
      for (std::size_t q = 0; q < d; ++q) {
        b2[p * d + q] = a2[p * d + q] + c2[p * d + q] + a1[p] * c1[q];
      }
    }
  }
}

GroupElement Level2RoughPath::cell(int i) const {
  GroupElement g = GroupElement::identity(dim_);
  const std::size_t d = static_cast<std::size_t>(dim_);
  for (int p = 0; p < dim_; ++p) {
    g.a1(p) = first_cells_[static_cast<std::size_t>(i) * d + p];
    for (int q = 0; q < dim_; ++q) {
      g.a2(p, q) = second_cells_[static_cast<std::size_t>(i) * d * d + p * d + q];
    }
  }
  return g;
}

void Level2RoughPath::first(int i, int j, std::span<double> out) const {
  const double* a = prefix1(i);
  const double* b = prefix1(j);
  for (int p = 0; p < dim_; ++p) out[p] = b[p] - a[p];
}

void Level2RoughPath::second(int i, int j, std::span<double> out) const {
  const double* a1 = prefix1(i);
  const double* b1 = prefix1(j);
  const double* a2 = prefix2(i);
  const double* b2 = prefix2(j);
  for (int p = 0; p < dim_; ++p) {
    for (int q = 0; q < dim_; ++q) {
      out[p * dim_ + q] =
          b2[p * dim_ + q] - a2[p * dim_ + q] - a1[p] * (b1[q] - a1[q]);
    }
  }
}

double Level2RoughPath::first_sq_norm(int i, int j) const {
  const double* a = prefix1(i);
  const double* b = prefix1(j);
  double s = 0.0;
  for (int p = 0; p < dim_; ++p) {
    const double x = b[p] - a[p];
    s += x * x;
  }
  return s;
}

double Level2RoughPath::second_sq_norm(int i, int j) const {
  const double* a1 = prefix1(i);
  const double* b1 = prefix1(j);
  const double* a2 = prefix2(i);
  const double* b2 = prefix2(j);
  double s = 0.0;
  for (int p = 0; p < dim_; ++p) {
    for (int q = 0; q < dim_; ++q) {
      const double x =
          b2[p * dim_ + q] - a2[p * dim_ + q] - a1[p] * (b1[q] - a1[q]);
      s += x * x;
    }
  }
  return s;
}

GroupElement Level2RoughPath::increment(int i, int j) const {
  if (i < 0 || j > grid_.n_steps() || i > j) {
    throw ValidationError("Level2RoughPath::increment: need 0 <= i <= j <= n");
  }
  GroupElement g = GroupElement::identity(dim_);
  std::vector<double> buf(static_cast<std::size_t>(dim_) * dim_);
  first(i, j, {g.a1.data(), static_cast<std::size_t>(dim_)});
  second(i, j, buf);
  for (int p = 0; p < dim_; ++p) {
    for (int q = 0; q < dim_; ++q) g.a2(p, q) = buf[p * dim_ + q];
  }
  return g;
}

GroupElement Level2RoughPath::increment(double s, double t) const {
  return increment(grid_.index_of(s), grid_.index_of(t));
}

SampledPath Level2RoughPath::trace() const {
  return SampledPath(grid_, dim_, prefix1_);
}

Level2RoughPath Level2RoughPath::refined(const TimeGrid& finer) const {
  const int r = grid_.refinement_factor(finer);
  if (r == 1) return *this;
  const std::size_t d = static_cast<std::size_t>(dim_);
  const std::size_t nf = static_cast<std::size_t>(finer.n_steps());
  std::vector<double> c1(nf * d);
  std::vector<double> c2(nf * d * d);
  const double rr = static_cast<double>(r);
  const double pairs = rr * (rr - 1.0) / 2.0;
  for (int c = 0; c < grid_.n_steps(); ++c) {
    const double* a1 = first_cells_.data() + static_cast<std::size_t>(c) * d;
    const double* a2 = second_cells_.data() + static_cast<std::size_t>(c) * d * d;
    for (int s = 0; s < r; ++s) {
      const std::size_t f = static_cast<std::size_t>(c) * r + s;
      for (std::size_t p = 0; p < d; ++p) {
        c1[f * d + p] = a1[p] / rr;
        for (std::size_t q = 0; q < d; ++q) {
          const double bb = (a1[p] / rr) * (a1[q] / rr);
          c2[f * d * d + p * d + q] = (a2[p * d + q] - pairs * bb) / rr;
        }
      }
    }
  }
  return Level2RoughPath(finer, dim_, std::move(c1), std::move(c2));
}

// ---------------------------------------------------------------------------
// RoughPathTable

RoughPathTable::RoughPathTable(const Level2RoughPath& path)
    : grid_(path.grid()), dim_(path.dim()) {
  const int nn = grid_.n_nodes();
  table_.resize(static_cast<std::size_t>(nn) * nn,
                GroupElement::identity(dim_));
  for (int i = 0; i < nn; ++i) {
    for (int j = i; j < nn; ++j) table_[index(i, j)] = path.increment(i, j);
  }
}

std::size_t RoughPathTable::index(int i, int j) const {
  if (i < 0 || i > j || j > grid_.n_steps()) {
    throw ValidationError("RoughPathTable: need 0 <= i <= j <= n");
  }
  return static_cast<std::size_t>(i) * grid_.n_nodes() + j;
}

// ---------------------------------------------------------------------------
// Operations

Level2RoughPath lift_piecewise_linear(const SampledPath& path) {
  const TimeGrid& g = path.grid();
  const std::size_t d = static_cast<std::size_t>(path.dim());
  const std::size_t n = static_cast<std::size_t>(g.n_steps());
  std::vector<double> c1(n * d);
  std::vector<double> c2(n * d * d);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t p = 0; p < d; ++p) {
      c1[c * d + p] = path(static_cast<int>(c + 1), static_cast<int>(p)) -
                      path(static_cast<int>(c), static_cast<int>(p));
    }
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = 0; q < d; ++q) {
        c2[c * d * d + p * d + q] = 0.5 * c1[c * d + p] * c1[c * d + q];
      }
    }
  }
  return Level2RoughPath(g, path.dim(), std::move(c1), std::move(c2));
}

namespace {

double element_distance(const GroupElement& a, const GroupElement& b) {
  return (a.a1 - b.a1).norm() + (a.a2 - b.a2).norm();
}

GroupElement fold_cells(const Level2RoughPath& x, int i, int j) {
  GroupElement g = GroupElement::identity(x.dim());
  for (int c = i; c < j; ++c) g = chen_compose(g, x.cell(c));
  return g;
}

void check_triple(int s, int u, int t) {
  if (!(s <= u && u <= t)) {
    throw ValidationError("chen_defect: need s <= u <= t");
  }
}

}  // namespace

double chen_defect(const Level2RoughPath& x, double s, double u, double t) {
  const int is = x.grid().index_of(s);
  const int iu = x.grid().index_of(u);
  const int it = x.grid().index_of(t);
  check_triple(is, iu, it);
  const GroupElement whole = x.increment(is, it);
  const GroupElement split =
      chen_compose(fold_cells(x, is, iu), fold_cells(x, iu, it));
  return element_distance(whole, split);
}

double chen_defect(const RoughPathTable& x, double s, double u, double t) {
  const int is = x.grid().index_of(s);
  const int iu = x.grid().index_of(u);
  const int it = x.grid().index_of(t);
  check_triple(is, iu, it);
  return element_distance(x.at(is, it),
                          chen_compose(x.at(is, iu), x.at(iu, it)));
}

double max_chen_defect(const Level2RoughPath& x) {
  const int nn = x.grid().n_nodes();
  double worst = 0.0;
  for (int s = 0; s < nn; ++s) {
    for (int u = s; u < nn; ++u) {
      const GroupElement left = x.increment(s, u);
      for (int t = u; t < nn; ++t) {
        worst = std::max(worst,
                         element_distance(x.increment(s, t),
                                          chen_compose(left, x.increment(u, t))));
      }
    }
  }
  return worst;
}

double geometric_defect(const Level2RoughPath& x) {
  const int nn = x.grid().n_nodes();
  const int d = x.dim();
  std::vector<double> a1(d);
  std::vector<double> a2(static_cast<std::size_t>(d) * d);
  double worst = 0.0;
  for (int i = 0; i < nn; ++i) {
    for (int j = i + 1; j < nn; ++j) {
      x.first(i, j, a1);
      x.second(i, j, a2);
      for (int p = 0; p < d; ++p) {
        for (int q = p; q < d; ++q) {
          const double e = a2[p * d + q] + a2[q * d + p] - a1[p] * a1[q];
          worst = std::max(worst, std::abs(e));
        }
      }
    }
  }
  return worst;
}

Level2RoughPath dilate(const Level2RoughPath& x, double lambda) {
  std::vector<double> c1 = x.first_cells();
  std::vector<double> c2 = x.second_cells();
  for (double& v : c1) v *= lambda;
  for (double& v : c2) v *= lambda * lambda;
  return Level2RoughPath(x.grid(), x.dim(), std::move(c1), std::move(c2));
}

Level2RoughPath young_translate(const Level2RoughPath& x,
                                const CameronMartinPath& h) {
  if (x.dim() != h.dim()) {
    throw ValidationError("young_translate: dimension mismatch (" +
                          std::to_string(x.dim()) + " vs " +
                          std::to_string(h.dim()) + ")");
  }
  const TimeGrid g = x.grid().common_refinement(h.grid());
  const Level2RoughPath xr = x.refined(g);
  const CameronMartinPath hr = h.refined(g);
  const std::size_t d = static_cast<std::size_t>(x.dim());
  const std::size_t n = static_cast<std::size_t>(g.n_steps());
  std::vector<double> c1 = xr.first_cells();
  std::vector<double> c2 = xr.second_cells();
  const double dt = g.dt();
  for (std::size_t c = 0; c < n; ++c) {
    const double* dx = xr.first_cells().data() + c * d;
    const auto hp = hr.derivative(static_cast<int>(c));
    for (std::size_t p = 0; p < d; ++p) {
      const double dhp = hp[p] * dt;
      for (std::size_t q = 0; q < d; ++q) {
        const double dhq = hp[q] * dt;
        c2[c * d * d + p * d + q] +=
            0.5 * dhp * dhq + 0.5 * dx[p] * dhq + 0.5 * dhp * dx[q];
      }
    }
    for (std::size_t p = 0; p < d; ++p) c1[c * d + p] += hp[p] * dt;
  }
  return Level2RoughPath(g, x.dim(), std::move(c1), std::move(c2));
}

Level2RoughPath young_pair(const Level2RoughPath& x) {
  const std::size_t d = static_cast<std::size_t>(x.dim());
  const std::size_t e = d + 1;
  const std::size_t n = static_cast<std::size_t>(x.grid().n_steps());
  const double dt = x.grid().dt();
  std::vector<double> c1(n * e);
  std::vector<double> c2(n * e * e);
  for (std::size_t c = 0; c < n; ++c) {
    const double* a1 = x.first_cells().data() + c * d;
    const double* a2 = x.second_cells().data() + c * d * d;
    for (std::size_t p = 0; p < d; ++p) {
      c1[c * e + p] = a1[p];
      for (std::size_t q = 0; q < d; ++q) {
        c2[c * e * e + p * e + q] = a2[p * d + q];
      }
      c2[c * e * e + p * e + d] = 0.5 * a1[p] * dt;
      c2[c * e * e + d * e + p] = 0.5 * dt * a1[p];
    }
    c1[c * e + d] = dt;
    c2[c * e * e + d * e + d] = 0.5 * dt * dt;
  }
  return Level2RoughPath(x.grid(), static_cast<int>(e), std::move(c1),
                         std::move(c2));
}

// ---------------------------------------------------------------------------
// CrossIntegral

CrossIntegral::CrossIntegral(const SampledPath& x, const SampledPath& y)
    : grid_(x.grid()), dim_(x.dim()) {
  if (!(x.grid() == y.grid()) || x.dim() != y.dim()) {
    throw ValidationError("cross_integral: grid or dimension mismatch");
  }
  const std::size_t d = static_cast<std::size_t>(dim_);
  const std::size_t nn = static_cast<std::size_t>(grid_.n_nodes());
  x_.resize(nn * d);
  y_.resize(nn * d);
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t p = 0; p < d; ++p) {
      x_[i * d + p] = x(static_cast<int>(i), static_cast<int>(p)) - x(0, static_cast<int>(p));
      y_[i * d + p] = y(static_cast<int>(i), static_cast<int>(p)) - y(0, static_cast<int>(p));
    }
  }
  prefix_.assign(nn * d * d, 0.0);
  for (std::size_t c = 0; c + 1 < nn; ++c) {
    for (std::size_t p = 0; p < d; ++p) {
      const double dx = x_[(c + 1) * d + p] - x_[c * d + p];
      for (std::size_t q = 0; q < d; ++q) {
        const double dy = y_[(c + 1) * d + q] - y_[c * d + q];
        prefix_[(c + 1) * d * d + p * d + q] =
            prefix_[c * d * d + p * d + q] + 0.5 * dx * dy +
            x_[c * d + p] * dy;
      }
    }
  }
}

void CrossIntegral::value(int i, int j, std::span<double> out) const {
  const std::size_t d = static_cast<std::size_t>(dim_);
  const double* pi = prefix_.data() + static_cast<std::size_t>(i) * d * d;
  const double* pj = prefix_.data() + static_cast<std::size_t>(j) * d * d;
  const double* xi = x_.data() + static_cast<std::size_t>(i) * d;
  const double* yi = y_.data() + static_cast<std::size_t>(i) * d;
  const double* yj = y_.data() + static_cast<std::size_t>(j) * d;
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = 0; q < d; ++q) {
      out[p * d + q] = pj[p * d + q] - pi[p * d + q] - xi[p] * (yj[q] - yi[q]);
    }
  }
}

Eigen::MatrixXd CrossIntegral::value(int i, int j) const {
  Eigen::MatrixXd m(dim_, dim_);
  std::vector<double> buf(static_cast<std::size_t>(dim_) * dim_);
  value(i, j, buf);
  for (int p = 0; p < dim_; ++p) {
    for (int q = 0; q < dim_; ++q) m(p, q) = buf[p * dim_ + q];
  }
  return m;
}

double CrossIntegral::sq_norm(int i, int j) const {
  const std::size_t d = static_cast<std::size_t>(dim_);
  const double* pi = prefix_.data() + static_cast<std::size_t>(i) * d * d;
  const double* pj = prefix_.data() + static_cast<std::size_t>(j) * d * d;
  const double* xi = x_.data() + static_cast<std::size_t>(i) * d;
  const double* yi = y_.data() + static_cast<std::size_t>(i) * d;
  const double* yj = y_.data() + static_cast<std::size_t>(j) * d;
  double s = 0.0;
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = 0; q < d; ++q) {
      const double v = pj[p * d + q] - pi[p * d + q] - xi[p] * (yj[q] - yi[q]);
      s += v * v;
    }
  }
  return s;
}

CrossIntegral cross_integral(const SampledPath& x, const SampledPath& y) {
  return CrossIntegral(x, y);
}

}  // namespace roughldp
