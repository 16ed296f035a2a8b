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

#include "roughldp/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roughldp/error.hpp"
#include "roughldp/parallel.hpp"

namespace roughldp {

DyadicFamily::DyadicFamily(int dim, int k_max, std::vector<double> base_values)
    : dim_(dim),
      k_max_(k_max),
      base_(TimeGrid::dyadic(k_max), dim, std::move(base_values)) {}

SampledPath DyadicFamily::level(int k) const {
  if (k < 0 || k > k_max_) {
    throw ValidationError("DyadicFamily::level: k out of range");
  }
  return base_.coarsened(TimeGrid::dyadic(k));
}

SampledPath DyadicFamily::level_on(int k, int grid_level) const {
  if (grid_level < k || grid_level > 24) {
    throw ValidationError("DyadicFamily::level_on: grid level below k");
  }
  return level(k).refined(TimeGrid::dyadic(grid_level));
}

DyadicFamily sample_brownian(int dim, int k_max, std::uint64_t seed) {
  if (k_max < 0 || k_max > 20) {
    throw ValidationError("sample_brownian: k_max must lie in [0, 20]");
  }
  if (dim <= 0 || dim > kMaxDim) {
    throw ValidationError("sample_brownian: unsupported dimension");
  }
  const TimeGrid g = TimeGrid::dyadic(k_max);
  const double sd = std::sqrt(g.dt());
  std::vector<double> v(static_cast<std::size_t>(g.n_nodes()) * dim, 0.0);
  RandomStream rng(seed, 0);
  for (int i = 0; i < g.n_steps(); ++i) {
    for (int p = 0; p < dim; ++p) {
      v[static_cast<std::size_t>(i + 1) * dim + p] =
          v[static_cast<std::size_t>(i) * dim + p] + sd * rng.normal();
    }
  }
  return DyadicFamily(dim, k_max, std::move(v));
}

SampledPath midpoint_increment(const DyadicFamily& family, int k) {
  if (k < 0 || k >= family.k_max()) {
    throw ValidationError("midpoint_increment: need 0 <= k < k_max");
  }
  const SampledPath coarse = family.level(k + 1);
  const TimeGrid g = coarse.grid();
  const int d = family.dim();
  const double scale = std::ldexp(1.0, k);
  const double width = std::ldexp(1.0, -k);
  std::vector<double> v(static_cast<std::size_t>(g.n_nodes()) * d);
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double t = g.time(i);
    // Level-k cell [(j-1)/2^k, j/2^k] containing t; nodes 2(j-1), 2j-1, 2j.
    const int j = std::min(i / 2, (1 << k) - 1) + 1;
    const double left = (j - 1) * width;
    const double right = j * width;
    const double tent = scale * std::min(t - left, right - t);
    for (int p = 0; p < d; ++p) {
      const double bump =
          2.0 * coarse(2 * j - 1, p) - coarse(2 * (j - 1), p) - coarse(2 * j, p);
      v[static_cast<std::size_t>(i) * d + p] = tent * bump;
    }
  }
  return SampledPath(g, d, std::move(v));
}

double level2_decomposition_residual(const SampledPath& x, const SampledPath& y) {
  if (!(x.grid() == y.grid()) || x.dim() != y.dim()) {
    throw ValidationError("level2_decomposition_residual: grid mismatch");
  }
  const SampledPath z = x - y;
  const CrossIntegral jxx(x, x);
  const CrossIntegral jyy(y, y);
  const CrossIntegral jzz(z, z);
  const CrossIntegral jzy(z, y);
  const int d = x.dim();
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  std::vector<double> a(dd), b(dd), c(dd), e(dd);
  const int nn = x.grid().n_nodes();
  double worst = 0.0;
  for (int i = 0; i < nn; ++i) {
    for (int j = i; j < nn; ++j) {
      jxx.value(i, j, a);
      jyy.value(i, j, b);
      jzz.value(i, j, c);
      jzy.value(i, j, e);
      for (int p = 0; p < d; ++p) {
        for (int q = 0; q < d; ++q) {
          const double y1p = y(j, p) - y(i, p);
          const double z1q = z(j, q) - z(i, q);
          const double lhs = a[p * d + q] - b[p * d + q];
          const double rhs =
              c[p * d + q] + e[p * d + q] - e[q * d + p] + y1p * z1q;
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      }
    }
  }
  return worst;
}

double level2_decomposition_check(const DyadicFamily& family, int k) {
  if (k < 0 || k >= family.k_max()) {
    throw ValidationError("level2_decomposition_check: need 0 <= k < k_max");
  }
  return level2_decomposition_residual(family.level(k + 1),
                                       family.level_on(k, k + 1));
}

double telescoping_residual(const DyadicFamily& family, int k, int big_k) {
  if (k < 0 || big_k > family.k_max() || k > big_k) {
    throw ValidationError("telescoping_residual: need 0 <= k <= K <= k_max");
  }
  SampledPath acc = family.level_on(k, big_k);
  for (int j = k; j < big_k; ++j) {
    acc = acc + midpoint_increment(family, j).refined(TimeGrid::dyadic(big_k));
  }
  const SampledPath target = family.level(big_k);
  double worst = 0.0;
  for (std::size_t i = 0; i < acc.values().size(); ++i) {
    worst = std::max(worst, std::abs(acc.values()[i] - target.values()[i]));
  }
  return worst;
}

const DecayFit& DecayTable::fit(const std::string& statistic) const {
  for (const auto& f : fits) {
    if (f.statistic == statistic) return f;
  }
  throw ValidationError("DecayTable: no statistic named " + statistic);
}

double decay_slope_bound(const BesovParams& params) {
  return -params.decay_margin() / 2.0;
}

namespace {

struct LineFit {
  double slope;
  double intercept;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  const double slope = den != 0.0 ? (n * sxy - sx * sy) / den
                                  : std::numeric_limits<double>::quiet_NaN();
  return {slope, (sy - slope * sx) / n};
}

}  // namespace

DecayTable decay_experiment(const BesovParams& params, int k_lo, int k_hi,
                            int n_mc, int dim, std::uint64_t seed, int workers) {
  if (!(params.decay_margin() > 0.0)) {
    throw ValidationError(
        "decay_experiment: requires 4m - 8m alpha - 1 > 0 (got " +
        std::to_string(params.decay_margin()) + ")");
  }
  if (k_lo < 0 || k_hi < k_lo || k_hi > 14) {
    throw ValidationError("decay_experiment: need 0 <= k_lo <= k_hi <= 14");
  }
  if (n_mc < 2) throw ValidationError("decay_experiment: need n_mc >= 2");

  const double a = params.alpha();
  const double m1 = params.level1_integrability();
  const double m2 = params.level2_integrability();
  const int n_levels = k_hi - k_lo + 1;
  constexpr int kStats = 4;
  // samples[(level * kStats + stat) * n_mc + sample]
  std::vector<double> samples(static_cast<std::size_t>(n_levels) * kStats * n_mc);

  parallel_for(static_cast<std::size_t>(n_mc), workers, [&](std::size_t s) {
    const DyadicFamily fam = sample_brownian(dim, k_hi + 1, mix_seed(seed, s));
    for (int k = k_lo; k <= k_hi; ++k) {
      const SampledPath z = midpoint_increment(fam, k);
      const SampledPath wk = fam.level_on(k, k + 1);
      const TimeGrid& g = z.grid();
      const auto slot = [&](int stat) -> double& {
        return samples[(static_cast<std::size_t>(k - k_lo) * kStats + stat) * n_mc + s];
      };
      slot(0) = besov_integral_of(
          g,
          [&](int i, int j) {
            double acc = 0.0;
            for (int p = 0; p < dim; ++p) {
              const double v = z(j, p) - z(i, p);
              acc += v * v;
            }
            return acc;
          },
          a, m1);
      const CrossIntegral jzz(z, z);
      slot(1) = besov_integral_of(
          g, [&](int i, int j) { return jzz.sq_norm(i, j); }, 2.0 * a, m2);
      const CrossIntegral jzw(z, wk);
      slot(2) = besov_integral_of(
          g, [&](int i, int j) { return jzw.sq_norm(i, j); }, 2.0 * a, m2);
      slot(3) = besov_integral_of(
          g,
          [&](int i, int j) {
            double wz = 0.0, zz = 0.0;
            for (int p = 0; p < dim; ++p) {
              const double u = wk(j, p) - wk(i, p);
              const double v = z(j, p) - z(i, p);
              wz += u * u;
              zz += v * v;
            }
            return wz * zz;
          },
          2.0 * a, m2);
    }
  });

  static const char* names[kStats] = {kStatLevel1, kStatJzz, kStatJzw,
                                      kStatWtensorZ};
  DecayTable table;
  table.insufficient_samples = n_mc < 100;
  for (int stat = 0; stat < kStats; ++stat) {
    std::vector<double> ks, logs;
    for (int k = k_lo; k <= k_hi; ++k) {
      const double* base =
          samples.data() + (static_cast<std::size_t>(k - k_lo) * kStats + stat) * n_mc;
      std::vector<double> sq(static_cast<std::size_t>(n_mc));
      for (int s = 0; s < n_mc; ++s) sq[s] = base[s] * base[s];
      const double mean_sq = pairwise_sum(sq) / n_mc;
      double var = 0.0;
      for (int s = 0; s < n_mc; ++s) var += (sq[s] - mean_sq) * (sq[s] - mean_sq);
      var /= (n_mc - 1);
      const double est = std::sqrt(mean_sq);
      const double se = est > 0.0 ? std::sqrt(var / n_mc) / (2.0 * est) : 0.0;
      table.rows.push_back({k, names[stat], est, se});
      if (est > 0.0) {
        ks.push_back(k);
        logs.push_back(std::log2(est));
      }
    }
    DecayFit f{names[stat], std::numeric_limits<double>::quiet_NaN(),
               std::numeric_limits<double>::quiet_NaN(),
               stat == 0 ? decay_slope_bound(params)
                         : std::numeric_limits<double>::quiet_NaN()};
    if (ks.size() >= 2) {
      const LineFit lf = least_squares(ks, logs);
      f.slope = lf.slope;
      f.intercept = lf.intercept;
    }
    table.fits.push_back(f);
  }
  return table;
}

IncrementMoment increment_moment_check(int dim, int k, int n_mc,
                                       std::uint64_t seed) {
  if (k < 0 || k > 12) throw ValidationError("increment_moment_check: bad k");
  if (n_mc < 2) throw ValidationError("increment_moment_check: need n_mc >= 2");
  constexpr int kExtra = 3;  // evaluation grid 2^{k+kExtra}
  const int level = k + kExtra;
  const TimeGrid g = TimeGrid::dyadic(level);
  const int per_cell = 1 << kExtra;
  const int n_cells = 1 << k;
  const int pairs_per_cell = per_cell * (per_cell + 1) / 2;
  const std::size_t n_pairs = static_cast<std::size_t>(n_cells) * pairs_per_cell;
  std::vector<double> sum(n_pairs, 0.0), sum_sq(n_pairs, 0.0);
  for (int s = 0; s < n_mc; ++s) {
    const DyadicFamily fam = sample_brownian(dim, k + 1, mix_seed(seed, s));
    const SampledPath z = midpoint_increment(fam, k).refined(g);
    std::size_t idx = 0;
    for (int c = 0; c < n_cells; ++c) {
      for (int a = 0; a < per_cell; ++a) {
        for (int b = a + 1; b <= per_cell; ++b, ++idx) {
          const int i = c * per_cell + a;
          const int j = c * per_cell + b;
          double v = 0.0;
          for (int p = 0; p < dim; ++p) {
            const double dz = z(j, p) - z(i, p);
            v += dz * dz;
          }
          sum[idx] += v;
          sum_sq[idx] += v * v;
        }
      }
    }
  }
  IncrementMoment out{k, 0.0, 0.0};
  const double cell = std::ldexp(1.0, -k);
  std::size_t idx = 0;
  for (int c = 0; c < n_cells; ++c) {
    for (int a = 0; a < per_cell; ++a) {
      for (int b = a + 1; b <= per_cell; ++b, ++idx) {
        const double span = (b - a) * g.dt();
        const double mean = sum[idx] / n_mc;
        const double var = std::max(0.0, sum_sq[idx] / n_mc - mean * mean);
        const double bound = std::min(cell, span);
        if (mean / bound > out.fitted_constant) {
          out.fitted_constant = mean / bound;
          out.max_stderr_ratio = std::sqrt(var / n_mc) / bound;
        }
      }
    }
  }
  return out;
}

std::vector<double> pathwise_cauchy(const DyadicFamily& family,
                                    const BesovParams& params) {
  std::vector<double> out;
  const int big_k = family.k_max();
  for (int k = 0; k < big_k; ++k) {
    const Level2RoughPath fine = lift_piecewise_linear(family.level_on(k + 1, big_k));
    const Level2RoughPath coarse = lift_piecewise_linear(family.level_on(k, big_k));
    out.push_back(besov_distance(fine, coarse, params));
  }
  return out;
}

}  // namespace roughldp
