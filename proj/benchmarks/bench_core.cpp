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

#include <cmath>

#include <benchmark/benchmark.h>

#include "roughldp/action.hpp"
#include "roughldp/dyadic.hpp"
#include "roughldp/flow.hpp"
#include "roughldp/montecarlo.hpp"
#include "roughldp/norms.hpp"
#include "roughldp/rough_core.hpp"
#include "roughldp/vector_fields.hpp"

using namespace roughldp;

namespace {

SampledPath brownian(int n, int d) {
  return sample_brownian(d, static_cast<int>(std::log2(n)), 42).base();
}

void BM_Lift(benchmark::State& state) {
  const SampledPath w = brownian(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(lift_piecewise_linear(w));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Lift)->RangeMultiplier(4)->Range(64, 4096);

void BM_BesovLevel1(benchmark::State& state) {
  const Level2RoughPath x = lift_piecewise_linear(brownian(static_cast<int>(state.range(0)), 2));
  for (auto _ : state) benchmark::DoNotOptimize(besov_norm(x, 1, 0.42, 16));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BesovLevel1)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_BesovDistance(benchmark::State& state) {
  const Level2RoughPath x = lift_piecewise_linear(brownian(256, 2));
  const Level2RoughPath y = dilate(x, 0.5);
  const BesovParams p(0.42, 4);
  for (auto _ : state) benchmark::DoNotOptimize(besov_distance(x, y, p));
}
BENCHMARK(BM_BesovDistance);

void BM_RdeLevel2(benchmark::State& state) {
  const CatalogSystem sys = make_system("rotating2d");
  const Level2RoughPath x = young_pair(lift_piecewise_linear(brownian(static_cast<int>(state.range(0)), 2)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_rde_level2(sys.system, x, 0.5, sys.a));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RdeLevel2)->RangeMultiplier(4)->Range(64, 4096);

void BM_Skeleton(benchmark::State& state) {
  const VectorFieldSystem vf = random_system(3, 3, 7);
  const CameronMartinPath h = CameronMartinPath::linear(TimeGrid(static_cast<int>(state.range(0))),
                                                        Eigen::VectorXd::Constant(3, 0.5));
  FlowOptions opts;
  opts.covariance = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_skeleton(vf, h, Vec::Zero(3), opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Skeleton)->ArgsProduct({{256, 4096}, {0, 1}});

void BM_MinimizeAction(benchmark::State& state) {
  const CatalogSystem sys = make_system("rotating2d");
  ActionProblem p(sys.system, sys.a, sys.a_prime);
  p.multistarts = 0;
  for (auto _ : state) benchmark::DoNotOptimize(minimize_action(p));
}
BENCHMARK(BM_MinimizeAction)->Unit(benchmark::kMillisecond);

void BM_HeatKernel(benchmark::State& state) {
  const CatalogSystem sys = make_system("additive");
  const MollifierKernel k(0.125, sys.a_prime);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_heat_kernel(sys.system, 0.5, sys.a, k, 1024, 1));
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_HeatKernel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
