// Copyright 2026 The agesim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "agesim/trend_stats.h"

namespace agesim {
namespace {

std::vector<double> Noisy(int64_t n) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> x(n);
  for (int64_t i = 0; i < n; ++i) x[i] = 0.05 * i + noise(rng);
  return x;
}

void BM_MannKendall(benchmark::State& state) {
  const std::vector<double> x = Noisy(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(MannKendall(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MannKendall)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_SensSlope(benchmark::State& state) {
  const std::vector<double> x = Noisy(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(SensSlope(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SensSlope)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

}  // namespace
}  // namespace agesim

BENCHMARK_MAIN();
