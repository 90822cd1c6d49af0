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

#include "agesim/report.h"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "agesim/ingest.h"
#include "json_util.h"

namespace agesim {
namespace {

using internal::Json;
using internal::Round9;

constexpr std::string_view kBundleIndicators[] = {
    kDurationIndicator, kMemoryIndicator, kSwapIndicator, kDiskIndicator};

std::string_view ShortUnit(std::string_view unit) {
  if (unit == "seconds") return "s";
  if (unit == "gigabytes") return "GB";
  return unit;
}

std::string Fixed(double v, int decimals) {
  std::string s = fmt::format("{:.{}f}", v, decimals);
  // Avoid "-0.00".
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') {
    s.erase(0, 1);
  }
  return s;
}

Json Real(double v) {
  if (!std::isfinite(v)) return nullptr;
  return Round9(v);
}

Json OptReal(const std::optional<double>& v) {
  return v ? Real(*v) : Json(nullptr);
}

Json TrendJson(const TrendTestResult& t) {
  return {{"s", t.s_statistic},      {"variance", Real(t.variance)},
          {"z", Real(t.z_score)},    {"verdict", VerdictName(t.verdict)},
          {"alpha", t.alpha},        {"n", t.n}};
}

Json SummaryJson(const std::optional<AgeingSummary>& s) {
  if (!s) return nullptr;
  return {{"v0", Real(s->v0)},
          {"vb", Real(s->vb)},
          {"vr", Real(s->vr)},
          {"ageing", Real(s->ageing)},
          {"rejuvenation", Real(s->rejuvenation)},
          {"sens_slope", OptReal(s->sens_slope)}};
}

Json BundleValue(const ReportBundle& b) {
  Json trends = Json::array();
  for (const TrendRow& r : b.trends) {
    trends.push_back({{"label", r.label},
                      {"indicator", r.indicator},
                      {"unit", r.unit},
                      {"trend", TrendJson(r.trend)},
                      {"slope_per_hour", OptReal(r.slope)}});
  }
  Json ageing = Json::array();
  for (const AgeingRow& r : b.ageing) {
    ageing.push_back({{"label", r.label},
                      {"indicator", r.indicator},
                      {"unit", r.unit},
                      {"summary", SummaryJson(r.summary)},
                      {"note", r.note}});
  }
  Json errors = Json::array();
  for (const ErrorDistributionRow& r : b.errors) {
    Json hours = Json::array();
    for (const auto& [h, n] : r.per_hour) hours.push_back({{"hour", h}, {"count", n}});
    errors.push_back({{"error", r.error},
                      {"count", r.count},
                      {"overload", r.overload},
                      {"excluded", r.excluded},
                      {"per_hour", hours}});
  }
  return {{"exclude_overload_errors", b.exclude_overload},
          {"trend_table", trends},
          {"ageing_table", ageing},
          {"error_distribution", errors},
          {"counted_errors", b.counted_errors}};
}

}  // namespace

void AddIndicators(ReportBundle& bundle, std::string_view label,
                   std::span<const IndicatorReport> indicators) {
  for (const IndicatorReport& ind : indicators) {
    TrendRow t;
    t.label = std::string(label);
    t.indicator = ind.series.name;
    t.unit = ind.series.unit;
    t.trend = ind.trend;
    if (ind.summary) t.slope = ind.summary->sens_slope;
    bundle.trends.push_back(std::move(t));

    AgeingRow a;
    a.label = std::string(label);
    a.indicator = ind.series.name;
    a.unit = ind.series.unit;
    a.summary = ind.summary;
    a.note = ind.summary_note;
    bundle.ageing.push_back(std::move(a));
  }
}

void AddErrors(ReportBundle& bundle, std::span<const ErrorLogEntry> errors) {
  std::map<std::string, ErrorDistributionRow> rows;
  for (const ErrorDistributionRow& r : bundle.errors) rows[r.error] = r;
  for (const ErrorLogEntry& e : errors) {
    ErrorDistributionRow& row = rows[e.error];
    row.error = e.error;
    ++row.count;
    row.overload = row.overload || e.overload;
    row.excluded = row.overload && bundle.exclude_overload;
    ++row.per_hour[static_cast<int64_t>(std::floor(e.time / kSecondsPerHour))];
  }
  bundle.errors.clear();
  bundle.counted_errors = 0;
  for (auto& [name, row] : rows) {
    if (!row.excluded) bundle.counted_errors += row.count;
    bundle.errors.push_back(std::move(row));
  }
}

ReportBundle BundleFor(const ScenarioReport& report, bool exclude_overload) {
  ReportBundle bundle;
  bundle.exclude_overload = exclude_overload;
  std::vector<IndicatorReport> main;
  for (std::string_view name : kBundleIndicators) {
    if (const IndicatorReport* ind = report.Find(name)) main.push_back(*ind);
  }
  AddIndicators(bundle, std::to_string(report.config.scenario_id), main);
  AddErrors(bundle, report.errors);
  return bundle;
}

std::string_view VerdictMarker(Verdict verdict) {
  switch (verdict) {
    case Verdict::kUpward:
      return "up";
    case Verdict::kDownward:
      return "down";
    case Verdict::kNoTrend:
      return "none";
    case Verdict::kInsufficientData:
      return "n/a";
  }
  return "?";
}

std::string FormatTrendTable(const ReportBundle& bundle) {
  std::string out = fmt::format("{:<10} {:<40} {:>5} {:>9} {:<6} {:>14}\n",
                                "scenario", "indicator", "n", "MKT Z",
                                "trend", "slope");
  for (const TrendRow& r : bundle.trends) {
    const std::string z = r.trend.verdict == Verdict::kInsufficientData
                              ? "-"
                              : Fixed(r.trend.z_score, 2);
    const std::string slope =
        r.slope ? fmt::format("{} {}/h", Fixed(*r.slope, 3), ShortUnit(r.unit))
                : "-";
    out += fmt::format("{:<10} {:<40} {:>5} {:>9} {:<6} {:>14}\n", r.label,
                       r.indicator, r.trend.n, z, VerdictMarker(r.trend.verdict),
                       slope);
  }
  return out;
}

std::string FormatAgeingTable(const ReportBundle& bundle) {
  std::string out = fmt::format("{:<10} {:<40} {:>10} {:>10} {:>10} {:>10}\n",
                                "scenario", "indicator", "v0", "vb", "A", "R");
  for (const AgeingRow& r : bundle.ageing) {
    if (!r.summary) {
      out += fmt::format("{:<10} {:<40} {}\n", r.label, r.indicator,
                         r.note.empty() ? "-" : r.note);
      continue;
    }
    const AgeingSummary& s = *r.summary;
    out += fmt::format("{:<10} {:<40} {:>10} {:>10} {:>10} {:>10}\n", r.label,
                       r.indicator, Fixed(s.v0, 2), Fixed(s.vb, 2),
                       Fixed(s.ageing, 2), Fixed(s.rejuvenation, 2));
  }
  return out;
}

std::string FormatErrorTable(const ReportBundle& bundle) {
  std::string out = fmt::format("{:<36} {:>8} {:>8}  {}\n", "error", "count",
                                "share", "note");
  for (const ErrorDistributionRow& r : bundle.errors) {
    std::string share = "-";
    if (!r.excluded && bundle.counted_errors > 0) {
      share = Fixed(100.0 * static_cast<double>(r.count) /
                        static_cast<double>(bundle.counted_errors),
                    2) + "%";
    }
    out += fmt::format("{:<36} {:>8} {:>8}  {}\n", r.error, r.count, share,
                       r.excluded ? "overload, excluded" : (r.overload ? "overload" : ""));
  }
  return out;
}

std::string FormatTables(const ReportBundle& bundle) {
  return fmt::format("Trend evaluation\n{}\nAgeing summary\n{}\nErrors\n{}",
                     FormatTrendTable(bundle), FormatAgeingTable(bundle),
                     FormatErrorTable(bundle));
}

std::string BundleJson(const ReportBundle& bundle) {
  return BundleValue(bundle).dump(2) + "\n";
}

std::string ScenarioReportJson(const ScenarioReport& report,
                               bool exclude_overload) {
  const ScenarioConfig& c = report.config;
  Json j;
  j["scenario_id"] = c.scenario_id;
  j["seed"] = c.seed;
  j["topology"] = TopologyName(c.topology);
  j["concurrency"] = c.concurrency;
  j["policy"] = PolicyName(c.policy);
  j["config"] = internal::ConfigToJsonValue(c);

  Json timeline = Json::array();
  for (const PhaseSpan& span : report.timeline) {
    timeline.push_back({{"phase", PhaseName(span.phase)},
                        {"start", Real(span.start)},
                        {"end", Real(span.end)}});
  }
  j["timeline"] = timeline;
  if (report.failure_point) {
    j["failure_point"] = {{"time", Real(*report.failure_point)},
                          {"hour", Real(*report.failure_point / kSecondsPerHour)}};
  } else {
    j["failure_point"] = nullptr;
  }
  const ScenarioTotals& t = report.totals;
  j["totals"] = {{"workloads", t.workloads},
                 {"success", t.success},
                 {"non_ageing_failures", t.non_ageing_failures},
                 {"ageing_failures", t.ageing_failures},
                 {"rejected", t.rejected},
                 {"interrupted", t.interrupted},
                 {"leftovers", t.leftovers},
                 {"boot_completions", t.boot_completions}};

  Json indicators = Json::array();
  for (const IndicatorReport& ind : report.indicators) {
    Json bins = Json::array();
    for (const HourBin& b : ind.hourly.bins) {
      // Timeline marks count hours from 1, so rejuvenation of a 24 h stress
      // phase sits at mark 25 and the post-rejuvenation hour at 26.
      bins.push_back({{"hour", b.hour},
                      {"mark", b.hour + 1},
                      {"phase", PhaseName(b.phase)},
                      {"mean", Real(b.mean)},
                      {"count", b.count}});
    }
    indicators.push_back({{"name", ind.series.name},
                          {"unit", ind.series.unit},
                          {"samples", ind.series.samples.size()},
                          {"trend_input", "stress-phase hourly means"},
                          {"trend", TrendJson(ind.trend)},
                          {"summary", SummaryJson(ind.summary)},
                          {"note", ind.summary_note},
                          {"bins", bins}});
  }
  j["indicators"] = indicators;

  Json hourly = Json::array();
  for (const HourCounts& h : report.hourly_counts) {
    hourly.push_back({{"hour", h.hour}, {"success", h.success}, {"failed", h.failed}});
  }
  j["hourly_counts"] = hourly;
  j["bundle"] = BundleValue(BundleFor(report, exclude_overload));
  return j.dump(2) + "\n";
}

std::string ErrorLogCsv(std::span<const ErrorLogEntry> errors) {
  std::string out = "time,step,error,ageing,overload\n";
  for (const ErrorLogEntry& e : errors) {
    out += fmt::format("{},{},{},{},{}\n", FormatReal(e.time), e.step, e.error,
                       e.ageing ? 1 : 0, e.overload ? 1 : 0);
  }
  return out;
}

}  // namespace agesim
