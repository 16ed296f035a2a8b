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
#include <string>
#include <vector>

#include "roughldp/norms.hpp"
#include "roughldp/rough_core.hpp"

namespace roughldp {

/// Brownian sample at resolution 2^{-k_max} together with its dyadic
/// polygonal approximations w(k), k <= k_max.
class DyadicFamily {
 public:
  DyadicFamily(int dim, int k_max, std::vector<double> base_values);

  int dim() const noexcept { return dim_; }
  int k_max() const noexcept { return k_max_; }
  const SampledPath& base() const noexcept { return base_; }

  /// w(k) on the 2^k grid.
  SampledPath level(int k) const;
  /// w(k) interpolated onto the 2^grid_level grid (grid_level >= k).
  SampledPath level_on(int k, int grid_level) const;

 private:
  int dim_;
  int k_max_;
  SampledPath base_;
};

/// Based Brownian motion with i.i.d. N(0, dt) increments per coordinate,
/// reproducible from `seed`.
DyadicFamily sample_brownian(int dim, int k_max, std::uint64_t seed);

/// z(k) = w(k+1) - w(k) on the 2^{k+1} grid, from the explicit tent formula
/// z(k)_t = 2^k min(t - (j-1)/2^k, j/2^k - t)
///          (2 w((2j-1)/2^{k+1}) - w((j-1)/2^k) - w(j/2^k)).
SampledPath midpoint_increment(const DyadicFamily& family, int k);

/// Largest residual of
///   J[x,x] - J[y,y] = J[x-y,x-y] + J[x-y,y] - J[x-y,y]^T + Y^1 (x) (X^1 - Y^1)
/// over all grid pairs of the common grid.
double level2_decomposition_residual(const SampledPath& x, const SampledPath& y);

/// The residual above with x = w(k+1), y = w(k).
double level2_decomposition_check(const DyadicFamily& family, int k);

/// Largest |w(k) + sum_{j=k}^{K-1} z(j) - w(K)| on the 2^K grid.
double telescoping_residual(const DyadicFamily& family, int k, int big_k);

struct DecayRow {
  int k;
  std::string statistic;
  double estimate;  // L^2 norm estimate sqrt(E[S^2])
  double stderr_;
};

struct DecayFit {
  std::string statistic;
  double slope;      // least-squares slope of log2(estimate) against k
  double intercept;
  double bound;      // theoretical slope bound (level-1 statistic only; NaN otherwise)
};

struct DecayTable {
  std::vector<DecayRow> rows;
  std::vector<DecayFit> fits;
  bool insufficient_samples = false;

  const DecayFit& fit(const std::string& statistic) const;
};

/// Statistic names in DecayTable.
inline constexpr const char* kStatLevel1 = "z_level1";        // ||z(k)||^{4m}_{alpha,4m-B}
inline constexpr const char* kStatJzz = "J_zz";               // ||J[z,z]||^{2m}_{2alpha,2m-B}
inline constexpr const char* kStatJzw = "J_zw";               // ||J[z,w(k)]||^{2m}
inline constexpr const char* kStatWtensorZ = "W_tensor_Z";    // ||W(k)^1 (x) Z(k)^1||^{2m}

/// Monte Carlo L^2 estimates of the four dyadic statistics per level with
/// log2-slope fits. Throws ValidationError unless 4m - 8 m alpha - 1 > 0 and
/// the level range is valid; flags fewer than 100 samples.
DecayTable decay_experiment(const BesovParams& params, int k_lo, int k_hi,
                            int n_mc, int dim, std::uint64_t seed,
                            int workers = 1);

/// Theoretical slope -(4m - 8 m alpha - 1)/2 for the level-1 statistic.
double decay_slope_bound(const BesovParams& params);

/// E|Z(k)^1_{s,t}|^2 over pairs (s,t) lying inside one level-k cell,
/// summarised by C = max E|Z|^2 / min(2^{-k}, t - s).
struct IncrementMoment {
  int k;
  double fitted_constant;
  double max_stderr_ratio;
};

IncrementMoment increment_moment_check(int dim, int k, int n_mc,
                                       std::uint64_t seed);

/// besov_distance(W(k+1), W(k)) on the 2^{k_max} grid for k < k_max.
std::vector<double> pathwise_cauchy(const DyadicFamily& family,
                                    const BesovParams& params);

}  // namespace roughldp
