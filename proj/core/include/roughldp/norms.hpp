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
#include <cmath>
#include <optional>
#include <vector>

#include "roughldp/error.hpp"
#include "roughldp/rough_core.hpp"

namespace roughldp {

/// Besov exponents (alpha, m): the first level is measured with
/// integrability 4m and the second with (2 alpha, 2m).
class BesovParams {
 public:
  /// Throws ValidationError unless m >= 1, 1/3 < alpha < 1/2,
  /// alpha - 1/(4m) > 1/3 and 4m - 8 m alpha > 2.
  BesovParams(double alpha, int m);

  /// Skips the admissibility check; used to probe the boundary of the
  /// admissible region.
  static BesovParams unchecked(double alpha, int m);

  static bool admissible(double alpha, int m);

  double alpha() const noexcept { return alpha_; }
  int m() const noexcept { return m_; }
  double level1_integrability() const noexcept { return 4.0 * m_; }
  double level2_integrability() const noexcept { return 2.0 * m_; }
  /// 4m - 8 m alpha - 1; positivity gates the dyadic decay bounds.
  double decay_margin() const noexcept { return 4.0 * m_ - 8.0 * m_ * alpha_ - 1.0; }

 private:
  BesovParams(double alpha, int m, bool check);

  double alpha_;
  int m_;
};

namespace detail {

/// |y|^m from |y|^2, with an integer fast path.
inline double power_from_sq(double sq, double m) {
  const double half = 0.5 * m;
  const double rounded = std::round(half);
  if (rounded == half && half >= 1.0 && half <= 64.0) {
    double base = sq;
    double acc = 1.0;
    for (int e = static_cast<int>(rounded); e > 0; e >>= 1) {
      if (e & 1) acc *= base;
      base *= base;
    }
    return acc;
  }
  return std::pow(sq, half);
}

void check_holder_exponent(double alpha);
void check_besov_exponents(double alpha, double m);

}  // namespace detail

/// sup over grid pairs s < t of |Y_{s,t}| / (t-s)^alpha, where
/// sq_norm(i, j) returns |Y_{t_i,t_j}|^2.
template <class SqNorm>
double holder_norm_of(const TimeGrid& grid, SqNorm&& sq_norm, double alpha) {
  detail::check_holder_exponent(alpha);
  const int nn = grid.n_nodes();
  std::vector<double> lag_weight(static_cast<std::size_t>(nn));
  for (int k = 1; k < nn; ++k) lag_weight[k] = std::pow(k * grid.dt(), -2.0 * alpha);
  double best = 0.0;
  for (int i = 0; i < nn; ++i) {
    for (int j = i + 1; j < nn; ++j) {
      best = std::max(best, sq_norm(i, j) * lag_weight[j - i]);
    }
  }
  return std::sqrt(best);
}

/// (iint |Y_{s,t}|^m / |t-s|^{1 + m alpha} ds dt)^{1/m} by the node-centred
/// midpoint rule: every grid pair (t_i, t_j), i < j, stands for the product
/// of its dual cells (width dt, dt/2 at the ends). Pairs closer than one
/// cell are excluded.
template <class SqNorm>
double besov_integral_of(const TimeGrid& grid, SqNorm&& sq_norm, double alpha,
                         double m) {
  detail::check_besov_exponents(alpha, m);
  const int nn = grid.n_nodes();
  const double dt = grid.dt();
  std::vector<double> lag_weight(static_cast<std::size_t>(nn));
  for (int k = 1; k < nn; ++k) lag_weight[k] = std::pow(k * dt, -(1.0 + m * alpha));
  double total = 0.0;
  for (int i = 0; i < nn; ++i) {
    const double wi = (i == 0 || i == nn - 1) ? 0.5 * dt : dt;
    double row = 0.0;
    for (int j = i + 1; j < nn; ++j) {
      const double wj = (j == nn - 1) ? 0.5 * dt : dt;
      const double sq = sq_norm(i, j);
      if (sq == 0.0) continue;
      row += wj * lag_weight[j - i] * detail::power_from_sq(sq, m);
    }
    total += wi * row;
  }
  return total;
}

template <class SqNorm>
double besov_norm_of(const TimeGrid& grid, SqNorm&& sq_norm, double alpha,
                     double m) {
  const double integral = besov_integral_of(grid, sq_norm, alpha, m);
  return integral > 0.0 ? std::pow(integral, 1.0 / m) : 0.0;
}

/// Hoelder norm of level 1 or 2. For level 2 callers pass the doubled
/// exponent 2 alpha themselves.
double holder_norm(const Level2RoughPath& x, int level, double alpha);
double holder_norm(const SampledPath& x, double alpha);

/// (alpha, m)-Besov norm of level 1 or 2; for level 2 callers pass
/// (2 alpha, 2m) themselves.
double besov_norm(const Level2RoughPath& x, int level, double alpha, double m);
double besov_norm(const SampledPath& x, double alpha, double m);
double besov_norm(const CrossIntegral& j, double alpha, double m);

/// ||X^1 - Y^1||_{alpha,4m-B} + ||X^2 - Y^2||_{2 alpha,2m-B}.
double besov_distance(const Level2RoughPath& x, const Level2RoughPath& y,
                      const BesovParams& p);

/// Besov-to-Hoelder comparison: Hoelder norm at exponent alpha - 1/(4m)
/// against the (alpha, 4m)-Besov norm, for both levels.
struct EmbeddingReport {
  double holder_level1;
  double besov_level1;
  double holder_level2;
  double besov_level2;
  /// holder / besov; empty when the Besov norm vanishes (degenerate path).
  std::optional<double> ratio_level1;
  std::optional<double> ratio_level2;

  bool degenerate() const { return !ratio_level1.has_value(); }
};

EmbeddingReport embedding_check(const Level2RoughPath& x, const BesovParams& p);

}  // namespace roughldp
