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

#ifndef AGESIM_REPORT_H_
#define AGESIM_REPORT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agesim/scenario.h"
#include "agesim/trend_stats.h"

namespace agesim {

struct TrendRow {
  std::string label;  // scenario id or input file
  std::string indicator;
  std::string unit;
  TrendTestResult trend;
  std::optional<double> slope;  // unit per hour
};

struct AgeingRow {
  std::string label;
  std::string indicator;
  std::string unit;
  std::optional<AgeingSummary> summary;
  std::string note;
};

struct ErrorDistributionRow {
  std::string error;
  int64_t count = 0;
  bool overload = false;
  bool excluded = false;  // overload error left out of the totals
  std::map<int64_t, int64_t> per_hour;
};

// Everything the tables and machine documents show. Both are rendered from
// this structure only.
struct ReportBundle {
  bool exclude_overload = true;
  std::vector<TrendRow> trends;
  std::vector<AgeingRow> ageing;
  std::vector<ErrorDistributionRow> errors;
  int64_t counted_errors = 0;  // after exclusion
};

void AddIndicators(ReportBundle& bundle, std::string_view label,
                   std::span<const IndicatorReport> indicators);
void AddErrors(ReportBundle& bundle, std::span<const ErrorLogEntry> errors);

// Workload duration, memory available, swap used and cache disk used.
ReportBundle BundleFor(const ScenarioReport& report, bool exclude_overload);

// "up", "down", "none" or "n/a".
std::string_view VerdictMarker(Verdict verdict);

std::string FormatTrendTable(const ReportBundle& bundle);
std::string FormatAgeingTable(const ReportBundle& bundle);
std::string FormatErrorTable(const ReportBundle& bundle);
std::string FormatTables(const ReportBundle& bundle);

std::string BundleJson(const ReportBundle& bundle);

// Full machine-readable scenario report; stable field order and reals
// rounded to nine decimals.
std::string ScenarioReportJson(const ScenarioReport& report,
                               bool exclude_overload = true);

// time,step,error,ageing,overload
std::string ErrorLogCsv(std::span<const ErrorLogEntry> errors);

}  // namespace agesim

#endif  // AGESIM_REPORT_H_
