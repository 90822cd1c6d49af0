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

#include <benchmark/benchmark.h>

#include "agesim/scenario.h"

namespace agesim {
namespace {

void BM_RunScenario(benchmark::State& state) {
  const ScenarioConfig config = MatrixScenario(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const ScenarioReport report = RunScenario(config);
    benchmark::DoNotOptimize(report.totals.workloads);
  }
}
BENCHMARK(BM_RunScenario)->DenseRange(1, 12)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace agesim

BENCHMARK_MAIN();
