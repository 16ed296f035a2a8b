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
#include <random>
#include <vector>

#include "roughldp/rough_core.hpp"

namespace roughldp::testing {

inline SampledPath random_path(const TimeGrid& grid, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> v(static_cast<std::size_t>(grid.n_nodes()) * dim, 0.0);
  for (int i = 1; i < grid.n_nodes(); ++i) {
    for (int k = 0; k < dim; ++k) {
      v[i * dim + k] = v[(i - 1) * dim + k] + std::sqrt(grid.dt()) * n01(rng);
    }
  }
  return SampledPath(grid, dim, std::move(v));
}

inline CameronMartinPath random_cm(const TimeGrid& grid, int dim, std::uint64_t seed,
                                   double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> d(static_cast<std::size_t>(grid.n_steps()) * dim);
  for (double& x : d) x = scale * n01(rng);
  return CameronMartinPath(grid, dim, std::move(d));
}

}  // namespace roughldp::testing
