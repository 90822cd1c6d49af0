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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "agesim/errors.h"
#include "agesim/report.h"

namespace agesim {
namespace {

ScenarioConfig Short(int concurrency, double stress_hours) {
  ScenarioConfig c = DefaultConfig(Topology::kMultiNode, concurrency);
  c.scenario_id = 99;
  c.stress_hours = stress_hours;
  return c;
}

const PhaseSpan* SpanOf(const ScenarioReport& r, Phase phase) {
  for (const PhaseSpan& s : r.timeline) {
    if (s.phase == phase) return &s;
  }
  return nullptr;
}

TEST(MatrixTest, TwelveScenarioLadder) {
  const std::vector<ScenarioConfig> matrix = StandardMatrix();
  ASSERT_EQ(matrix.size(), 12u);
  const int ladder[] = {1, 2, 4, 8, 16, 64};
  for (int id = 1; id <= 12; ++id) {
    const ScenarioConfig& c = matrix[id - 1];
    EXPECT_EQ(c.scenario_id, id);
    EXPECT_EQ(c.topology, id <= 6 ? Topology::kMultiNode : Topology::kAllInOne);
    EXPECT_EQ(c.concurrency, ladder[(id - 1) % 6]);
    EXPECT_EQ(c.stress_hours, 24.0);
    EXPECT_EQ(c.post_rejuvenation_hours, 1.0);
  }
  EXPECT_THROW(MatrixScenario(0), ConfigError);
  EXPECT_THROW(MatrixScenario(13), ConfigError);
}

TEST(PolicyTest, Names) {
  EXPECT_EQ(ParsePolicy("wait"), RejuvenationPolicy::kWaitForSchedule);
  EXPECT_EQ(ParsePolicy("rejuvenate-on-failure"),
            RejuvenationPolicy::kRejuvenateOnFailure);
  EXPECT_FALSE(ParsePolicy("panic"));
}

TEST(PolicyTest, EarlyFailurePolicy) {
  Cloud healthy = Cloud::Fresh(Topology::kMultiNode);
  Cloud broken = Cloud::Fresh(Topology::kMultiNode);
  broken.MarkDeployFailed();
  using P = RejuvenationPolicy;
  EXPECT_EQ(EarlyFailurePolicy(P::kWaitForSchedule, healthy),
            PolicyAction::kContinue);
  EXPECT_EQ(EarlyFailurePolicy(P::kRejuvenateOnFailure, healthy),
            PolicyAction::kContinue);
  EXPECT_EQ(EarlyFailurePolicy(P::kWaitForSchedule, broken),
            PolicyAction::kContinue);
  EXPECT_EQ(EarlyFailurePolicy(P::kRejuvenateOnFailure, broken),
            PolicyAction::kTriggerRejuvenationNow);
}

TEST(PhaseListTest, ParseAndFormat) {
  const std::vector<PhaseStep> phases =
      ParsePhaseList("stress:24, wait:2,rejuvenation,post:1.5");
  ASSERT_EQ(phases.size(), 4u);
  EXPECT_EQ(phases[0].phase, Phase::kStress);
  EXPECT_EQ(phases[1].phase, Phase::kWait);
  EXPECT_EQ(phases[1].hours, 2.0);
  EXPECT_EQ(phases[2].phase, Phase::kRejuvenation);
  EXPECT_EQ(phases[3].hours, 1.5);
  EXPECT_EQ(FormatPhaseList(phases), "stress:24,wait:2,rejuvenation,post:1.5");
  EXPECT_THROW(ParsePhaseList("stress"), ConfigError);
  EXPECT_THROW(ParsePhaseList("nap:3"), ConfigError);
  EXPECT_THROW(ParsePhaseList("stress:x"), ConfigError);
}

TEST(ScenarioConfigTest, Validation) {
  ScenarioConfig c = Short(0, 1);
  EXPECT_THROW(c.Validate(), ConfigError);
  c = Short(1, -1);
  EXPECT_THROW(c.Validate(), ConfigError);
  c = Short(1, 1);
  c.phases = {{Phase::kStress, NAN}};
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_THROW(RunScenario(Short(0, 1)), ConfigError);
}

TEST(RunScenarioTest, ZeroStressHours) {
  const ScenarioReport r = RunScenario(Short(2, 0));
  ASSERT_EQ(r.timeline.size(), 3u);
  EXPECT_EQ(r.timeline[0].start, r.timeline[0].end);
  const IndicatorReport* wd = r.Find(kDurationIndicator);
  ASSERT_NE(wd, nullptr);
  EXPECT_EQ(wd->trend.verdict, Verdict::kInsufficientData);
  EXPECT_FALSE(wd->summary);
  EXPECT_FALSE(wd->summary_note.empty());
  for (const IndicatorReport& ind : r.indicators) {
    EXPECT_EQ(ind.trend.verdict, Verdict::kInsufficientData) << ind.series.name;
  }
  EXPECT_FALSE(ScenarioReportJson(r).empty());
}

TEST(RunScenarioTest, ShortStressSuppressesTrend) {
  const ScenarioReport r = RunScenario(Short(1, 9));
  EXPECT_EQ(r.Find(kSwapIndicator)->trend.verdict, Verdict::kInsufficientData);
  EXPECT_EQ(r.Find(kSwapIndicator)->trend.n, 9);
  const ScenarioReport r10 = RunScenario(Short(1, 10));
  EXPECT_NE(r10.Find(kSwapIndicator)->trend.verdict,
            Verdict::kInsufficientData);
}

TEST(RunScenarioTest, ScenarioOneResourceTrends) {
  const ScenarioReport r = RunScenario(MatrixScenario(1));
  EXPECT_EQ(r.Find(kSwapIndicator)->trend.verdict, Verdict::kUpward);
  EXPECT_EQ(r.Find(kMemoryIndicator)->trend.verdict, Verdict::kDownward);
  EXPECT_FALSE(r.failure_point);
  ASSERT_TRUE(r.Find(kSwapIndicator)->summary);
  EXPECT_GT(r.Find(kSwapIndicator)->summary->ageing, 0.0);
}

TEST(RunScenarioTest, IndicatorsAndNodeDisk) {
  const ScenarioReport r = RunScenario(Short(2, 2));
  for (std::string_view name :
       {kDurationIndicator, kMemoryIndicator, kSwapIndicator, kDiskIndicator}) {
    EXPECT_NE(r.Find(name), nullptr) << name;
  }
  for (const NodeSpec& n : DefaultNodes(Topology::kMultiNode)) {
    EXPECT_NE(r.Find(NodeDiskIndicator(n.name)), nullptr) << n.name;
  }
  const auto& disk = r.Find(kDiskIndicator)->series.samples;
  const auto& c1 = r.Find(NodeDiskIndicator("compute1"))->series.samples;
  const auto& c2 = r.Find(NodeDiskIndicator("compute2"))->series.samples;
  ASSERT_EQ(disk.size(), c1.size());
  for (size_t i = 0; i < disk.size(); ++i) {
    EXPECT_EQ(disk[i].value, c1[i].value + c2[i].value);
  }
}

TEST(RunScenarioTest, TimelineAndSampling) {
  const ScenarioReport r = RunScenario(Short(1, 3));
  ASSERT_EQ(r.timeline.size(), 3u);
  EXPECT_EQ(r.timeline[0].phase, Phase::kStress);
  EXPECT_EQ(r.timeline[0].end, 3 * 3600.0);
  EXPECT_EQ(r.timeline[1].phase, Phase::kRejuvenation);
  EXPECT_EQ(r.timeline[1].end, 4 * 3600.0);
  EXPECT_EQ(r.timeline[2].end, 5 * 3600.0);
  // 30 s cadence in stress and post, one reading inside rejuvenation.
  const auto& mem = r.Find(kMemoryIndicator)->series.samples;
  EXPECT_EQ(mem.size(), 3u * 120 + 1 + 120);
  const IndicatorReport* swap = r.Find(kSwapIndicator);
  EXPECT_EQ(swap->hourly.marks.rejuvenation_hours, std::vector<int64_t>{3});
  EXPECT_EQ(swap->hourly.marks.post_rejuvenation_hours,
            std::vector<int64_t>{4});
}

// Every sample and workload sits in exactly one phase, and stored bins equal
// means recomputed from the raw samples.
TEST(RunScenarioPropertyTest, PhaseAccounting) {
  ScenarioConfig c = Short(4, 3);
  c.phases = ParsePhaseList("stress:3,wait:1,rejuvenation,post:1");
  const ScenarioReport r = RunScenario(c);
  for (const IndicatorReport& ind : r.indicators) {
    std::map<int64_t, std::pair<double, int64_t>> sums;
    for (const Sample& s : ind.series.samples) {
      int spans = 0;
      for (const PhaseSpan& p : r.timeline) {
        spans += s.timestamp >= p.start && s.timestamp < p.end;
      }
      EXPECT_EQ(spans, 1) << ind.series.name << " t=" << s.timestamp;
      auto& [sum, n] = sums[static_cast<int64_t>(std::floor(s.timestamp / 3600))];
      sum += s.value;
      ++n;
    }
    ASSERT_EQ(ind.hourly.bins.size(), sums.size());
    for (const HourBin& bin : ind.hourly.bins) {
      const auto& [sum, n] = sums.at(bin.hour);
      EXPECT_EQ(bin.count, n);
      EXPECT_EQ(bin.mean, sum / static_cast<double>(n));
    }
  }
  const PhaseSpan* wait = SpanOf(r, Phase::kWait);
  ASSERT_NE(wait, nullptr);
  for (const WorkloadResult& w : r.workloads) {
    EXPECT_FALSE(w.start >= wait->start && w.start < wait->end);
    int spans = 0;
    for (const PhaseSpan& p : r.timeline) {
      spans += w.start >= p.start && w.start < p.end;
    }
    EXPECT_EQ(spans, 1);
  }
}

TEST(RunScenarioTest, CountsAndErrorLogAgree) {
  const ScenarioReport r = RunScenario(MatrixScenario(5));
  int64_t success = 0, failed = 0, with_error = 0;
  for (const HourCounts& h : r.hourly_counts) {
    success += h.success;
    failed += h.failed;
  }
  for (const WorkloadResult& w : r.workloads) with_error += w.error.has_value();
  EXPECT_EQ(success, r.totals.success);
  EXPECT_EQ(success + failed, r.totals.workloads);
  EXPECT_EQ(r.totals.success + r.totals.non_ageing_failures +
                r.totals.ageing_failures,
            r.totals.workloads);
  // The log keeps overload errors; it only flags them.
  EXPECT_EQ(static_cast<int64_t>(r.errors.size()), with_error);
  int64_t overload = 0;
  for (const ErrorLogEntry& e : r.errors) {
    EXPECT_EQ(e.overload, e.error == "QuotaExceeded:SecurityGroup");
    overload += e.overload;
  }
  EXPECT_GT(overload, 0);
  for (size_t i = 1; i < r.errors.size(); ++i) {
    EXPECT_LE(r.errors[i - 1].time, r.errors[i].time);
  }
}

TEST(RunScenarioTest, WaitPolicyKeepsStressGoing) {
  ScenarioConfig c = Short(1, 4);
  c.faults.deploy_failure_probability = 1.0;
  const ScenarioReport r = RunScenario(c);
  ASSERT_TRUE(r.failure_point);
  EXPECT_EQ(*r.failure_point, 0.0);
  EXPECT_EQ(r.timeline[0].end, 4 * 3600.0);
  EXPECT_EQ(r.totals.rejected, r.totals.workloads);
}

TEST(RunScenarioTest, RejuvenateOnFailureCutsStress) {
  ScenarioConfig c = Short(1, 4);
  c.faults.deploy_failure_probability = 1.0;
  c.policy = RejuvenationPolicy::kRejuvenateOnFailure;
  const ScenarioReport r = RunScenario(c);
  EXPECT_EQ(r.timeline[0].end, 3600.0);
  EXPECT_EQ(r.timeline[1].phase, Phase::kRejuvenation);
  EXPECT_EQ(r.timeline[1].start, 3600.0);
}

TEST(RunScenarioTest, HealthyCloudIgnoresPolicy) {
  ScenarioConfig c = Short(1, 3);
  const ScenarioReport a = RunScenario(c);
  c.policy = RejuvenationPolicy::kRejuvenateOnFailure;
  const ScenarioReport b = RunScenario(c);
  EXPECT_EQ(a.timeline, b.timeline);
  EXPECT_EQ(a.workloads.size(), b.workloads.size());
  EXPECT_EQ(a.Find(kSwapIndicator)->series, b.Find(kSwapIndicator)->series);
}

TEST(RunScenarioTest, ScenarioFourFailsButRunsFullDay) {
  const ScenarioReport r = RunScenario(MatrixScenario(4));
  ASSERT_TRUE(r.failure_point);
  EXPECT_GT(*r.failure_point, 12 * 3600.0);
  EXPECT_LT(*r.failure_point, 24 * 3600.0);
  EXPECT_EQ(r.timeline[0].end, 24 * 3600.0);
}

// Failure comes only from leftovers eating the quota; the fresh deployment
// must serve at least one clean workload.
TEST(RunScenarioPropertyTest, RecoveryAfterLeftoverFailure) {
  for (uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    ScenarioConfig c = Short(16, 2);
    c.seed = seed;
    c.faults.probabilities["boot server"]["ServerErrorStatus"] = 0.3;
    const ScenarioReport r = RunScenario(c);
    SCOPED_TRACE(seed);
    ASSERT_TRUE(r.failure_point);
    EXPECT_LT(*r.failure_point, 3600.0);
    const PhaseSpan* post = SpanOf(r, Phase::kPostRejuvenation);
    ASSERT_NE(post, nullptr);
    int64_t post_success = 0;
    for (const WorkloadResult& w : r.workloads) {
      post_success += w.start >= post->start &&
                      w.classification == Classification::kSuccess;
    }
    EXPECT_GE(post_success, 1);
  }
}

TEST(RunSuiteTest, EmptyInput) { EXPECT_TRUE(RunSuite({}).empty()); }

TEST(RunSuiteTest, OrderAndErrorsAreKept) {
  std::vector<ScenarioConfig> configs = {Short(1, 1), Short(0, 1), Short(2, 1)};
  configs[0].scenario_id = 7;
  configs[1].scenario_id = 8;
  configs[2].scenario_id = 9;
  const std::vector<SuiteEntry> entries = RunSuite(configs, 2);
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].scenario_id, 7);
  EXPECT_TRUE(entries[0].report);
  EXPECT_FALSE(entries[1].report);
  EXPECT_NE(entries[1].error.find("concurrency"), std::string::npos);
  EXPECT_TRUE(entries[2].report);
}

TEST(RunSuiteTest, ParallelismDoesNotChangeReports) {
  std::vector<ScenarioConfig> configs;
  for (int c : {1, 4, 16}) configs.push_back(Short(c, 2));
  const auto serial = RunSuite(configs, 1);
  const auto parallel = RunSuite(configs, 3);
  for (size_t i = 0; i < configs.size(); ++i) {
    EXPECT_EQ(ScenarioReportJson(*serial[i].report),
              ScenarioReportJson(*parallel[i].report));
  }
}

TEST(RunSuiteTest, SeedIsolation) {
  std::vector<ScenarioConfig> configs = {Short(2, 2), Short(4, 2)};
  configs[1].faults.probabilities["boot server"]["ServerErrorStatus"] = 0.05;
  const auto before = RunSuite(configs, 2);
  configs[1].seed = 77;
  const auto after = RunSuite(configs, 2);
  EXPECT_EQ(ScenarioReportJson(*before[0].report),
            ScenarioReportJson(*after[0].report));
  EXPECT_NE(ScenarioReportJson(*before[1].report),
            ScenarioReportJson(*after[1].report));
}

}  // namespace
}  // namespace agesim
