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

#ifndef AGESIM_SCENARIO_H_
#define AGESIM_SCENARIO_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agesim/cloud.h"
#include "agesim/trend_stats.h"
#include "agesim/workload.h"

namespace agesim {

enum class RejuvenationPolicy {
  kWaitForSchedule,      // rejuvenate only when the stress phase ends
  kRejuvenateOnFailure,  // cut the stress phase at the first failed hour
};

std::string_view PolicyName(RejuvenationPolicy policy);
std::optional<RejuvenationPolicy> ParsePolicy(std::string_view name);

enum class PolicyAction { kContinue, kTriggerRejuvenationNow };

// Consulted at the end of every stress hour.
PolicyAction EarlyFailurePolicy(RejuvenationPolicy policy, Cloud& cloud);

// One entry of the phase list. Rejuvenation lasts
// ResourceParams::rejuvenation_duration_s; its `hours` is ignored.
struct PhaseStep {
  Phase phase = Phase::kStress;
  double hours = 0.0;
};

// Parses "stress:24,wait:2,stress:24,rejuvenation,post:1".
std::vector<PhaseStep> ParsePhaseList(std::string_view text);
std::string FormatPhaseList(const std::vector<PhaseStep>& phases);

struct FaultConfig {
  // step name -> error name -> probability per attempt
  std::map<std::string, std::map<std::string, double>> probabilities;
  double deploy_failure_probability = 0.0;
};

struct ScenarioConfig {
  int scenario_id = 0;  // 1-12 for the standard matrix
  Topology topology = Topology::kMultiNode;
  int concurrency = 1;
  double stress_hours = 24.0;
  double post_rejuvenation_hours = 1.0;
  uint64_t seed = 1;
  RejuvenationPolicy policy = RejuvenationPolicy::kWaitForSchedule;
  // Empty means stress, rejuvenation, post-rejuvenation from the fields
  // above.
  std::vector<PhaseStep> phases;
  FaultConfig faults;
  ResourceParams resources;
  ServiceParams service;
  // Empty means DefaultNodes(topology).
  std::vector<NodeSpec> nodes;
  QuotaTable quotas = QuotaTable::Default();
  std::optional<WorkloadDefinition> workload;

  std::vector<PhaseStep> EffectivePhases() const;
  // Throws ConfigError.
  void Validate() const;
};

// Defaults for one topology; service slots differ between the single node
// and the multi-node deployment.
ScenarioConfig DefaultConfig(Topology topology, int concurrency);

// Scenario `id` of the standard matrix: 1-6 multi-node and 7-12 all-in-one,
// each with concurrency 1, 2, 4, 8, 16, 64.
ScenarioConfig MatrixScenario(int id, uint64_t seed = 1);
std::vector<ScenarioConfig> StandardMatrix(uint64_t seed = 1);

struct IndicatorReport {
  IndicatorSeries series;
  HourlySeries hourly;
  // Mann-Kendall over the stress-phase hourly means.
  TrendTestResult trend;
  std::optional<AgeingSummary> summary;
  // Why `summary` is absent.
  std::string summary_note;
};

struct ErrorLogEntry {
  double time = 0.0;  // when the failing workload ended
  std::string step;
  std::string error;
  bool ageing = false;
  // SecurityGroup quota errors: kept in the log, marked for exclusion.
  bool overload = false;
};

struct HourCounts {
  int64_t hour = 0;
  int64_t success = 0;
  int64_t failed = 0;
};

struct ScenarioTotals {
  int64_t workloads = 0;
  int64_t success = 0;
  int64_t non_ageing_failures = 0;
  int64_t ageing_failures = 0;
  int64_t rejected = 0;  // launched against a failed cloud
  int64_t interrupted = 0;
  int64_t leftovers = 0;
  int64_t boot_completions = 0;
};

struct ScenarioReport {
  ScenarioConfig config;
  std::vector<PhaseSpan> timeline;
  // Workload duration, then the service node's memory available and swap
  // used, the disk used summed over cache-hosting nodes, and the disk used
  // of every node.
  std::vector<IndicatorReport> indicators;
  std::vector<ErrorLogEntry> errors;
  std::vector<HourCounts> hourly_counts;
  std::optional<double> failure_point;
  ScenarioTotals totals;
  std::vector<WorkloadResult> workloads;

  const IndicatorReport* Find(std::string_view name) const;
};

inline constexpr std::string_view kDurationIndicator =
    "workload_duration_seconds";
inline constexpr std::string_view kMemoryIndicator =
    "memory_available_gigabytes";
inline constexpr std::string_view kSwapIndicator = "swap_used_gigabytes";
inline constexpr std::string_view kDiskIndicator = "disk_used_gigabytes";

std::string NodeDiskIndicator(std::string_view node);

// Builds the trend test and ageing summary of one indicator.
IndicatorReport AnalyzeIndicator(IndicatorSeries series,
                                 const std::vector<PhaseSpan>& timeline);

// Runs the phase list on a fresh cloud. Throws ConfigError for invalid
// configs.
ScenarioReport RunScenario(const ScenarioConfig& config);

struct SuiteEntry {
  int scenario_id = 0;
  std::optional<ScenarioReport> report;
  std::string error;  // set when the scenario could not run
};

// Runs independent scenarios on up to `workers` threads (0 = hardware
// concurrency). Results follow the order of `configs`.
std::vector<SuiteEntry> RunSuite(const std::vector<ScenarioConfig>& configs,
                                 unsigned workers = 0);

}  // namespace agesim

#endif  // AGESIM_SCENARIO_H_
