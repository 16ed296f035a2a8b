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
#include <cstdint>
#include <functional>
#include <random>
#include <span>

namespace roughldp {

/// splitmix64 finaliser; derives independent stream seeds from
/// (master seed, counter).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter);

/// Normal/uniform draws from a counter-derived stream.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : engine_(mix_seed(master_seed, stream_id)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Runs task(0) .. task(n_tasks - 1) on up to `workers` threads. Tasks must
/// write only to their own slots; results are then independent of the worker
/// count. The first exception thrown by a task is rethrown.
void parallel_for(std::size_t n_tasks, int workers,
                  const std::function<void(std::size_t)>& task);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

/// Samples per RNG block; sample i uses stream (seed, i / kSamplesPerBlock).
inline constexpr std::size_t kSamplesPerBlock = 256;

}  // namespace roughldp
