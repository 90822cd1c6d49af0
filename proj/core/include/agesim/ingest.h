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

#ifndef AGESIM_INGEST_H_
#define AGESIM_INGEST_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agesim/scenario.h"
#include "agesim/trend_stats.h"

namespace agesim {

// Flat sample files: UTF-8, LF line endings, header `timestamp,metric,value`.
// Timestamps are epoch seconds (integer or decimal) or ISO-8601 UTC
// ("2024-03-01T12:00:00Z", fractional seconds and +hh:mm offsets allowed),
// one style per file. The unit is taken from the metric suffix: _seconds,
// _gigabytes, otherwise count.

std::string InferUnit(std::string_view metric);

// Shortest decimal that parses back to exactly `value`.
std::string FormatReal(double value);

// One series per metric, sorted by timestamp, in metric-name order.
// Throws ParseError, DuplicateTimestampError or EmptyFileError.
std::vector<IndicatorSeries> IngestCsv(
    std::istream& in, const std::optional<std::string>& metric_filter = {});
// Also throws IoError.
std::vector<IndicatorSeries> IngestCsvFile(
    const std::filesystem::path& path,
    const std::optional<std::string>& metric_filter = {});

void WriteCsv(std::ostream& out, std::span<const IndicatorSeries> series);

// Workload reports: {"workloads": [{"start": 0, "end": 70.5,
// "status": "success" | "failed", "failed_step": "...", "error": "..."}]}
// with times in seconds.
struct WorkloadRecord {
  double start = 0.0;
  double end = 0.0;
  bool success = true;
  std::string failed_step;
  std::string error;
};

struct IngestedWorkloads {
  IndicatorSeries durations;  // successful workloads keyed by start time
  std::vector<HourCounts> hourly_counts;
  std::vector<ErrorLogEntry> errors;
  // Records with end < start, skipped.
  int64_t rejected = 0;
};

// Times are shifted by `origin` before binning. Throws ParseError or
// EmptyFileError.
IngestedWorkloads IngestWorkloadReport(std::string_view json_text,
                                       double origin = 0.0);
IngestedWorkloads IngestWorkloadReportFile(const std::filesystem::path& path,
                                           double origin = 0.0);

std::string WorkloadReportJson(std::span<const WorkloadResult> results);

}  // namespace agesim

#endif  // AGESIM_INGEST_H_
