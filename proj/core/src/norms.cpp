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

#include "roughldp/norms.hpp"

#include <string>

namespace roughldp {

BesovParams::BesovParams(double alpha, int m) : BesovParams(alpha, m, true) {}

BesovParams::BesovParams(double alpha, int m, bool check)
    : alpha_(alpha), m_(m) {
  if (m < 1) throw ValidationError("BesovParams: m must be a positive integer");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("BesovParams: alpha must lie in (0, 1]");
  }
  if (check && !admissible(alpha, m)) {
    throw ValidationError("BesovParams: (alpha, m) = (" + std::to_string(alpha) +
                          ", " + std::to_string(m) +
                          ") violates 1/3 < alpha < 1/2, alpha - 1/(4m) > 1/3, "
                          "4m - 8m alpha > 2");
  }
}

BesovParams BesovParams::unchecked(double alpha, int m) {
  return BesovParams(alpha, m, false);
}

bool BesovParams::admissible(double alpha, int m) {
  if (m < 1) return false;
  const double mm = static_cast<double>(m);
  return alpha > 1.0 / 3.0 && alpha < 0.5 &&
         alpha - 1.0 / (4.0 * mm) > 1.0 / 3.0 &&
         4.0 * mm - 8.0 * mm * alpha > 2.0;
}

namespace detail {

void check_holder_exponent(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("holder_norm: alpha must lie in (0, 1], got " +
                          std::to_string(alpha));
  }
}

void check_besov_exponents(double alpha, double m) {
  if (!(m >= 1.0)) {
    throw ValidationError("besov_norm: m must be >= 1, got " + std::to_string(m));
  }
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw ValidationError("besov_norm: alpha must lie in (0, 2], got " +
                          std::to_string(alpha));
  }
}

}  // namespace detail

namespace {

void check_level(int level) {
  if (level != 1 && level != 2) {
    throw ValidationError("rough path level must be 1 or 2");
  }
}

}  // namespace

double holder_norm(const Level2RoughPath& x, int level, double alpha) {
  check_level(level);
  if (level == 1) {
    return holder_norm_of(
        x.grid(), [&](int i, int j) { return x.first_sq_norm(i, j); }, alpha);
  }
  return holder_norm_of(
      x.grid(), [&](int i, int j) { return x.second_sq_norm(i, j); }, alpha);
}

double holder_norm(const SampledPath& x, double alpha) {
  const int d = x.dim();
  return holder_norm_of(
      x.grid(),
      [&](int i, int j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
          const double v = x(j, k) - x(i, k);
          s += v * v;
        }
        return s;
      },
      alpha);
}

double besov_norm(const Level2RoughPath& x, int level, double alpha, double m) {
  check_level(level);
  if (level == 1) {
    return besov_norm_of(
        x.grid(), [&](int i, int j) { return x.first_sq_norm(i, j); }, alpha, m);
  }
  return besov_norm_of(
      x.grid(), [&](int i, int j) { return x.second_sq_norm(i, j); }, alpha, m);
}

double besov_norm(const SampledPath& x, double alpha, double m) {
  const int d = x.dim();
  return besov_norm_of(
      x.grid(),
      [&](int i, int j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
          const double v = x(j, k) - x(i, k);
          s += v * v;
        }
        return s;
      },
      alpha, m);
}

double besov_norm(const CrossIntegral& j, double alpha, double m) {
  return besov_norm_of(
      j.grid(), [&](int a, int b) { return j.sq_norm(a, b); }, alpha, m);
}

double besov_distance(const Level2RoughPath& x, const Level2RoughPath& y,
                      const BesovParams& p) {
  if (!(x.grid() == y.grid()) || x.dim() != y.dim()) {
    throw ValidationError("besov_distance: rough paths live on different grids");
  }
  const int d = x.dim();
  std::vector<double> a(static_cast<std::size_t>(d) * d);
  std::vector<double> b(static_cast<std::size_t>(d) * d);
  const double level1 = besov_norm_of(
      x.grid(),
      [&](int i, int j) {
        x.first(i, j, a);
        y.first(i, j, b);
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
        return s;
      },
      p.alpha(), p.level1_integrability());
  const double level2 = besov_norm_of(
      x.grid(),
      [&](int i, int j) {
        x.second(i, j, a);
        y.second(i, j, b);
        double s = 0.0;
        for (int k = 0; k < d * d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
        return s;
      },
      2.0 * p.alpha(), p.level2_integrability());
  return level1 + level2;
}

EmbeddingReport embedding_check(const Level2RoughPath& x, const BesovParams& p) {
  const double beta = p.alpha() - 1.0 / p.level1_integrability();
  EmbeddingReport r{};
  r.holder_level1 = holder_norm(x, 1, beta);
  r.besov_level1 = besov_norm(x, 1, p.alpha(), p.level1_integrability());
  r.holder_level2 = holder_norm(x, 2, 2.0 * beta);
  r.besov_level2 = besov_norm(x, 2, 2.0 * p.alpha(), p.level2_integrability());
  if (r.besov_level1 > 0.0) r.ratio_level1 = r.holder_level1 / r.besov_level1;
  if (r.besov_level2 > 0.0) r.ratio_level2 = r.holder_level2 / r.besov_level2;
  return r;
}

}  // namespace roughldp
