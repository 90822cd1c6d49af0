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

#include "agesim/scenario.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>
#include <utility>

#include <fmt/format.h>

#include "agesim/errors.h"
#include "agesim/fault_model.h"
#include "agesim/rng.h"

namespace agesim {
namespace {

constexpr int kMatrixConcurrency[] = {1, 2, 4, 8, 16, 64};

std::string_view Trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::optional<Phase> ParsePhaseName(std::string_view name) {
  if (name == "stress") return Phase::kStress;
  if (name == "wait") return Phase::kWait;
  if (name == "rejuvenation") return Phase::kRejuvenation;
  if (name == "post" || name == "post-rejuvenation") {
    return Phase::kPostRejuvenation;
  }
  return std::nullopt;
}

std::string_view ShortPhaseName(Phase phase) {
  switch (phase) {
    case Phase::kStress:
      return "stress";
    case Phase::kWait:
      return "wait";
    case Phase::kRejuvenation:
      return "rejuvenation";
    case Phase::kPostRejuvenation:
      return "post";
  }
  return "unknown";
}

// Gauge and workload observations gathered while the phases run.
class Recorder {
 public:
  Recorder(const Cloud& cloud, uint64_t seed)
      : node_disk_(cloud.nodes().size()), noise_(seed, "gauges") {}

  void Record(Cloud& cloud, double t) {
    if (cloud.CheckFailed()) NoteFailure(t);
    const std::vector<NodeGauges> gauges = cloud.ReadGauges(noise_);
    const NodeGauges& service = gauges[cloud.service_node()];
    memory_.push_back({t, service.memory_available_gb});
    swap_.push_back({t, service.swap_used_gb});
    double cache_disk = 0.0;
    for (size_t node : cloud.cache_nodes()) cache_disk += gauges[node].disk_used_gb;
    disk_.push_back({t, cache_disk});
    for (size_t i = 0; i < gauges.size(); ++i) {
      node_disk_[i].push_back({t, gauges[i].disk_used_gb});
    }
  }

  void NoteFailure(double t) {
    if (!failure_point_) failure_point_ = t;
  }

  std::vector<Sample> memory_, swap_, disk_;
  std::vector<std::vector<Sample>> node_disk_;
  std::optional<double> failure_point_;

 private:
  RandomStream noise_;
};

std::vector<Sample> DurationSamples(const std::vector<WorkloadResult>& results) {
  std::vector<Sample> samples;
  for (const WorkloadResult& r : results) {
    if (r.classification != Classification::kSuccess) continue;
    double t = r.start;
    // Concurrent workloads may share a start time; keep timestamps strictly
    // increasing by moving to the next representable value.
    if (!samples.empty() && t <= samples.back().timestamp) {
      t = std::nextafter(samples.back().timestamp,
                         std::numeric_limits<double>::infinity());
    }
    samples.push_back({t, r.duration});
  }
  return samples;
}

}  // namespace

std::string_view PolicyName(RejuvenationPolicy policy) {
  switch (policy) {
    case RejuvenationPolicy::kWaitForSchedule:
      return "wait";
    case RejuvenationPolicy::kRejuvenateOnFailure:
      return "rejuvenate-on-failure";
  }
  return "unknown";
}

std::optional<RejuvenationPolicy> ParsePolicy(std::string_view name) {
  if (name == "wait") return RejuvenationPolicy::kWaitForSchedule;
  if (name == "rejuvenate-on-failure") {
    return RejuvenationPolicy::kRejuvenateOnFailure;
  }
  return std::nullopt;
}

PolicyAction EarlyFailurePolicy(RejuvenationPolicy policy, Cloud& cloud) {
  if (policy == RejuvenationPolicy::kRejuvenateOnFailure && cloud.CheckFailed()) {
    return PolicyAction::kTriggerRejuvenationNow;
  }
  return PolicyAction::kContinue;
}

std::vector<PhaseStep> ParsePhaseList(std::string_view text) {
  std::vector<PhaseStep> phases;
  while (true) {
    const size_t comma = text.find(',');
    const std::string_view item = Trim(text.substr(0, comma));
    const size_t colon = item.find(':');
    const std::string_view name = Trim(item.substr(0, colon));
    const auto phase = ParsePhaseName(name);
    if (!phase) throw ConfigError(fmt::format("unknown phase '{}'", name));
    PhaseStep step{*phase, 0.0};
    if (colon != std::string_view::npos) {
      const std::string_view num = Trim(item.substr(colon + 1));
      auto [ptr, ec] =
          std::from_chars(num.data(), num.data() + num.size(), step.hours);
      if (ec != std::errc() || ptr != num.data() + num.size()) {
        throw ConfigError(fmt::format("bad phase length '{}'", num));
      }
    } else if (*phase != Phase::kRejuvenation) {
      throw ConfigError(fmt::format("phase '{}' needs a length in hours", name));
    }
    phases.push_back(step);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return phases;
}

std::string FormatPhaseList(const std::vector<PhaseStep>& phases) {
  std::string out;
  for (const PhaseStep& p : phases) {
    if (!out.empty()) out += ',';
    out += ShortPhaseName(p.phase);
    if (p.phase != Phase::kRejuvenation) out += fmt::format(":{}", p.hours);
  }
  return out;
}

std::vector<PhaseStep> ScenarioConfig::EffectivePhases() const {
  if (!phases.empty()) return phases;
  return {{Phase::kStress, stress_hours},
          {Phase::kRejuvenation, 0.0},
          {Phase::kPostRejuvenation, post_rejuvenation_hours}};
}

void ScenarioConfig::Validate() const {
  if (concurrency < 1) {
    throw ConfigError(fmt::format("concurrency must be >= 1, got {}", concurrency));
  }
  if (!(stress_hours >= 0) || !std::isfinite(stress_hours)) {
    throw ConfigError("stress_hours must be a finite value >= 0");
  }
  if (!(post_rejuvenation_hours >= 0) || !std::isfinite(post_rejuvenation_hours)) {
    throw ConfigError("post_rejuvenation_hours must be a finite value >= 0");
  }
  for (const PhaseStep& p : phases) {
    if (!(p.hours >= 0) || !std::isfinite(p.hours)) {
      throw ConfigError("phase lengths must be finite values >= 0");
    }
  }
  resources.Validate();
  service.Validate();
  for (const NodeSpec& node : nodes) {
    if (node.name.empty()) throw ConfigError("node without a name");
  }
  if (!nodes.empty()) {
    // The cloud constructor checks the node set against the topology.
    Cloud probe(topology, nodes, resources, quotas);
  }
}

ScenarioConfig DefaultConfig(Topology topology, int concurrency) {
  ScenarioConfig config;
  config.topology = topology;
  config.concurrency = concurrency;
  config.service.service_slots = topology == Topology::kMultiNode ? 6.0 : 3.0;
  return config;
}

ScenarioConfig MatrixScenario(int id, uint64_t seed) {
  if (id < 1 || id > 12) {
    throw ConfigError(fmt::format("matrix scenario id must be 1-12, got {}", id));
  }
  const Topology topology = id <= 6 ? Topology::kMultiNode : Topology::kAllInOne;
  ScenarioConfig config = DefaultConfig(topology, kMatrixConcurrency[(id - 1) % 6]);
  config.scenario_id = id;
  config.seed = seed;
  return config;
}

std::vector<ScenarioConfig> StandardMatrix(uint64_t seed) {
  std::vector<ScenarioConfig> configs;
  for (int id = 1; id <= 12; ++id) configs.push_back(MatrixScenario(id, seed));
  return configs;
}

const IndicatorReport* ScenarioReport::Find(std::string_view name) const {
  for (const IndicatorReport& r : indicators) {
    if (r.series.name == name) return &r;
  }
  return nullptr;
}

std::string NodeDiskIndicator(std::string_view node) {
  return fmt::format("node_disk_used_gigabytes{{node=\"{}\"}}", node);
}

IndicatorReport AnalyzeIndicator(IndicatorSeries series,
                                 const std::vector<PhaseSpan>& timeline) {
  IndicatorReport report;
  report.series = std::move(series);
  if (report.series.samples.empty()) {
    report.trend = MannKendall({});
    report.summary_note = "no samples";
    return report;
  }
  report.hourly = BinHourly(report.series, std::span<const PhaseSpan>(timeline));
  const std::vector<double> stress = report.hourly.StressMeans();
  report.trend = MannKendall(stress);
  try {
    report.summary = SummarizeAgeing(report.hourly);
  } catch (const MissingPhaseBinError& e) {
    report.summary_note = e.what();
  }
  return report;
}

ScenarioReport RunScenario(const ScenarioConfig& config) {
  config.Validate();
  const WorkloadDefinition defn =
      config.workload ? *config.workload : WorkloadDefinition::Default();

  FaultModel faults(config.seed);
  for (const auto& [step, errors] : config.faults.probabilities) {
    for (const auto& [error, p] : errors) faults.SetProbability(step, error, p);
  }
  faults.set_deploy_failure_probability(config.faults.deploy_failure_probability);
  const std::vector<std::string> names = defn.StepNames();
  faults.BindSteps(names);
  ValidateFaults(defn, faults);

  Cloud cloud(config.topology,
              config.nodes.empty() ? DefaultNodes(config.topology) : config.nodes,
              config.resources, config.quotas);
  if (faults.SampleDeployFailure()) cloud.MarkDeployFailed();

  ScenarioReport report;
  report.config = config;
  Recorder rec(cloud, config.seed);
  const double interval = 30.0;

  for (const PhaseStep& step : config.EffectivePhases()) {
    const double start = cloud.clock();
    switch (step.phase) {
      case Phase::kStress:
      case Phase::kPostRejuvenation: {
        const double until = start + step.hours * kSecondsPerHour;
        StreamHooks hooks;
        hooks.sample_interval_s = interval;
        hooks.on_sample = [&](double t) { rec.Record(cloud, t); };
        if (step.phase == Phase::kStress) {
          hooks.on_hour = [&](double t) {
            if (cloud.CheckFailed()) rec.NoteFailure(t);
            return EarlyFailurePolicy(config.policy, cloud) ==
                   PolicyAction::kTriggerRejuvenationNow;
          };
        }
        StreamOutcome out = RunStream(defn, cloud, faults, config.service, until,
                                      config.concurrency, hooks);
        cloud.AdvanceTo(out.ended_at);
        report.totals.interrupted += out.interrupted;
        for (WorkloadResult& r : out.results) {
          if (!r.launched) rec.NoteFailure(r.start);
          report.workloads.push_back(std::move(r));
        }
        report.timeline.push_back({step.phase, start, out.ended_at});
        break;
      }
      case Phase::kWait: {
        const double until = start + step.hours * kSecondsPerHour;
        for (int64_t k = 0;; ++k) {
          const double t = start + static_cast<double>(k) * interval;
          if (t >= until) break;
          cloud.AdvanceTo(t);
          rec.Record(cloud, t);
        }
        cloud.AdvanceTo(until);
        report.timeline.push_back({Phase::kWait, start, until});
        break;
      }
      case Phase::kRejuvenation: {
        cloud.Rejuvenate();
        if (faults.SampleDeployFailure()) cloud.MarkDeployFailed();
        const double end = cloud.clock();
        // One reading at the end of the slot, still inside it.
        rec.Record(cloud, std::max(start, end - interval));
        report.timeline.push_back({Phase::kRejuvenation, start, end});
        break;
      }
    }
  }

  std::stable_sort(report.workloads.begin(), report.workloads.end(),
                   [](const WorkloadResult& a, const WorkloadResult& b) {
                     return a.start != b.start ? a.start < b.start
                                               : a.stream < b.stream;
                   });

  std::vector<size_t> boot_steps;
  for (size_t i = 0; i < defn.steps().size(); ++i) {
    const StepSpec& s = defn.step(i);
    if (s.action == ActionType::kCreate && s.kind == EntityKind::kServer) {
      boot_steps.push_back(i);
    }
  }

  ScenarioTotals& totals = report.totals;
  std::map<int64_t, HourCounts> hours;
  for (const WorkloadResult& r : report.workloads) {
    ++totals.workloads;
    totals.leftovers += r.TotalLeftovers();
    if (!r.launched) ++totals.rejected;
    switch (r.classification) {
      case Classification::kSuccess:
        ++totals.success;
        break;
      case Classification::kNonAgeingFailure:
        ++totals.non_ageing_failures;
        break;
      case Classification::kAgeingFailure:
        ++totals.ageing_failures;
        break;
    }
    for (const StepRecord& s : r.steps) {
      if (s.outcome == StepOutcome::kOk &&
          std::find(boot_steps.begin(), boot_steps.end(), s.step) !=
              boot_steps.end()) {
        ++totals.boot_completions;
      }
    }
    const auto hour = static_cast<int64_t>(std::floor(r.start / kSecondsPerHour));
    HourCounts& hc = hours[hour];
    hc.hour = hour;
    if (r.classification == Classification::kSuccess) {
      ++hc.success;
    } else {
      ++hc.failed;
    }
    if (r.error) {
      report.errors.push_back(
          {r.end, r.error->step, r.error->name, r.error->ageing, r.error->overload});
    }
  }
  for (const auto& [hour, hc] : hours) report.hourly_counts.push_back(hc);
  std::stable_sort(report.errors.begin(), report.errors.end(),
                   [](const ErrorLogEntry& a, const ErrorLogEntry& b) {
                     return a.time < b.time;
                   });
  report.failure_point = rec.failure_point_;

  auto add = [&](std::string name, std::string unit, std::vector<Sample> samples) {
    report.indicators.push_back(AnalyzeIndicator(
        IndicatorSeries{std::move(name), std::move(unit), std::move(samples)},
        report.timeline));
  };
  add(std::string(kDurationIndicator), "seconds", DurationSamples(report.workloads));
  add(std::string(kMemoryIndicator), "gigabytes", std::move(rec.memory_));
  add(std::string(kSwapIndicator), "gigabytes", std::move(rec.swap_));
  add(std::string(kDiskIndicator), "gigabytes", std::move(rec.disk_));
  for (size_t i = 0; i < cloud.nodes().size(); ++i) {
    add(NodeDiskIndicator(cloud.nodes()[i].name), "gigabytes",
        std::move(rec.node_disk_[i]));
  }
  return report;
}

std::vector<SuiteEntry> RunSuite(const std::vector<ScenarioConfig>& configs,
                                 unsigned workers) {
  std::vector<SuiteEntry> entries(configs.size());
  if (configs.empty()) return entries;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(configs.size()));

  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < configs.size(); i = next++) {
      entries[i].scenario_id = configs[i].scenario_id;
      try {
        entries[i].report = RunScenario(configs[i]);
      } catch (const std::exception& e) {
        entries[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> threads;
  for (unsigned w = 1; w < workers; ++w) threads.emplace_back(work);
  work();
  for (std::thread& t : threads) t.join();
  return entries;
}

}  // namespace agesim
