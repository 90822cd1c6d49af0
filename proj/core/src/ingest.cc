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

#include "agesim/ingest.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "agesim/errors.h"
#include "agesim/fault_model.h"
#include "json_util.h"

namespace agesim {
namespace {

using internal::Json;

enum class TimeStyle { kEpoch, kIso };

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

// Strips a trailing {label="..."} set before looking at the suffix.
std::string_view BaseMetric(std::string_view metric) {
  const size_t brace = metric.find('{');
  return brace == std::string_view::npos ? metric : metric.substr(0, brace);
}

std::optional<double> ParseDecimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  for (char c : text) {
    const bool ok = (c >= '0' && c <= '9') || c == '.' || c == '-' ||
                    c == 'e' || c == 'E' || c == '+';
    if (!ok) return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

bool ParseFixedInt(std::string_view text, int* out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), *out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

// YYYY-MM-DDTHH:MM:SS[.fff](Z|+hh:mm|-hh:mm) to epoch seconds.
std::optional<double> ParseIso8601(std::string_view s) {
  if (s.size() < 20 || s[4] != '-' || s[7] != '-' ||
      (s[10] != 'T' && s[10] != 't') || s[13] != ':' || s[16] != ':') {
    return std::nullopt;
  }
  int year, month, day, hour, minute, second;
  if (!ParseFixedInt(s.substr(0, 4), &year) ||
      !ParseFixedInt(s.substr(5, 2), &month) ||
      !ParseFixedInt(s.substr(8, 2), &day) ||
      !ParseFixedInt(s.substr(11, 2), &hour) ||
      !ParseFixedInt(s.substr(14, 2), &minute) ||
      !ParseFixedInt(s.substr(17, 2), &second)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{
      std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
      std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return std::nullopt;

  std::string_view rest = s.substr(19);
  double fraction = 0.0;
  if (!rest.empty() && rest.front() == '.') {
    size_t digits = 1;
    while (digits < rest.size() && rest[digits] >= '0' && rest[digits] <= '9') {
      ++digits;
    }
    if (digits == 1) return std::nullopt;
    const std::string frac = fmt::format("0{}", rest.substr(0, digits));
    std::from_chars(frac.data(), frac.data() + frac.size(), fraction);
    rest.remove_prefix(digits);
  }
  int offset_s = 0;
  if (rest == "Z" || rest == "z") {
    offset_s = 0;
  } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') &&
             rest[3] == ':') {
    int oh, om;
    if (!ParseFixedInt(rest.substr(1, 2), &oh) ||
        !ParseFixedInt(rest.substr(4, 2), &om) || oh > 23 || om > 59) {
      return std::nullopt;
    }
    offset_s = (oh * 3600 + om * 60) * (rest[0] == '-' ? -1 : 1);
  } else {
    return std::nullopt;
  }
  const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  const int64_t whole = static_cast<int64_t>(days) * 86400 + hour * 3600 +
                        minute * 60 + second - offset_s;
  return static_cast<double>(whole) + fraction;
}

TimeStyle DetectStyle(std::string_view ts) {
  return ts.find('T') != std::string_view::npos ||
                 ts.find('t') != std::string_view::npos ||
                 ts.find(':') != std::string_view::npos
             ? TimeStyle::kIso
             : TimeStyle::kEpoch;
}

size_t LineOfOffset(std::string_view text, size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<size_t>(
                 std::count(text.begin(), text.begin() + offset, '\n'));
}

std::string ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("cannot read {}", path.string()));
  return buf.str();
}

double NumberField(const Json& rec, const char* key, size_t index) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_number()) {
    throw ParseError(0, fmt::format("workload {}: '{}' must be a number", index, key));
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw ParseError(0, fmt::format("workload {}: '{}' is not finite", index, key));
  }
  return v;
}

std::string StringField(const Json& rec, const char* key, size_t index) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw ParseError(0, fmt::format("workload {}: '{}' must be a string", index, key));
  }
  return it->get<std::string>();
}

}  // namespace

std::string InferUnit(std::string_view metric) {
  const std::string_view base = BaseMetric(metric);
  if (EndsWith(base, "_seconds")) return "seconds";
  if (EndsWith(base, "_gigabytes")) return "gigabytes";
  return "count";
}

std::string FormatReal(double value) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error("cannot format real");
  return std::string(buf.data(), ptr);
}

std::vector<IndicatorSeries> IngestCsv(
    std::istream& in, const std::optional<std::string>& metric_filter) {
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("read failed");
  if (text.empty()) throw EmptyFileError("empty sample file");

  std::map<std::string, std::vector<Sample>> by_metric;
  std::optional<TimeStyle> style;
  size_t rows = 0;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find('\r') != std::string_view::npos) {
      throw ParseError(line_no, "CR characters are not allowed; use LF line endings");
    }
    if (line_no == 1) {
      if (line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
      if (line != "timestamp,metric,value") {
        throw ParseError(line_no, "header must be 'timestamp,metric,value'");
      }
      continue;
    }
    if (line.empty()) {
      if (pos >= text.size()) break;
      throw ParseError(line_no, "empty line");
    }
    const size_t c1 = line.find(',');
    const size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos ||
        line.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected 3 comma-separated fields");
    }
    const std::string_view ts = line.substr(0, c1);
    const std::string_view metric = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string_view value_text = line.substr(c2 + 1);
    if (metric.empty()) throw ParseError(line_no, "empty metric name");

    const TimeStyle row_style = DetectStyle(ts);
    if (style && *style != row_style) {
      throw ParseError(line_no, "mixed timestamp styles");
    }
    style = row_style;
    const std::optional<double> t =
        row_style == TimeStyle::kIso ? ParseIso8601(ts) : ParseDecimal(ts);
    if (!t) throw ParseError(line_no, fmt::format("bad timestamp '{}'", ts));
    const std::optional<double> v = ParseDecimal(value_text);
    if (!v) throw ParseError(line_no, fmt::format("bad value '{}'", value_text));
    ++rows;
    if (metric_filter && metric != *metric_filter) continue;
    by_metric[std::string(metric)].push_back({*t, *v});
  }
  if (rows == 0) throw EmptyFileError("sample file has no rows");

  std::vector<IndicatorSeries> out;
  for (auto& [metric, samples] : by_metric) {
    std::stable_sort(samples.begin(), samples.end(),
                     [](const Sample& a, const Sample& b) {
                       return a.timestamp < b.timestamp;
                     });
    for (size_t i = 1; i < samples.size(); ++i) {
      if (samples[i].timestamp == samples[i - 1].timestamp) {
        throw DuplicateTimestampError(metric, samples[i].timestamp);
      }
    }
    out.push_back({metric, InferUnit(metric), std::move(samples)});
  }
  return out;
}

std::vector<IndicatorSeries> IngestCsvFile(
    const std::filesystem::path& path,
    const std::optional<std::string>& metric_filter) {
  std::istringstream in(ReadAll(path));
  return IngestCsv(in, metric_filter);
}

void WriteCsv(std::ostream& out, std::span<const IndicatorSeries> series) {
  out << "timestamp,metric,value\n";
  for (const IndicatorSeries& s : series) {
    for (const Sample& sample : s.samples) {
      out << FormatReal(sample.timestamp) << ',' << s.name << ','
          << FormatReal(sample.value) << '\n';
    }
  }
}

IngestedWorkloads IngestWorkloadReport(std::string_view json_text,
                                       double origin) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(LineOfOffset(json_text, e.byte), e.what());
  }
  if (!doc.is_object() || !doc.contains("workloads") ||
      !doc["workloads"].is_array()) {
    throw ParseError(0, "expected an object with a 'workloads' array");
  }
  const Json& list = doc["workloads"];
  if (list.empty()) throw EmptyFileError("workload report has no records");

  std::vector<WorkloadRecord> records;
  IngestedWorkloads out;
  for (size_t i = 0; i < list.size(); ++i) {
    const Json& rec = list[i];
    if (!rec.is_object()) {
      throw ParseError(0, fmt::format("workload {}: expected an object", i));
    }
    WorkloadRecord r;
    r.start = NumberField(rec, "start", i) - origin;
    r.end = NumberField(rec, "end", i) - origin;
    const std::string status = StringField(rec, "status", i);
    if (status == "success") {
      r.success = true;
    } else if (status == "failed") {
      r.success = false;
    } else {
      throw ParseError(0, fmt::format("workload {}: unknown status '{}'", i, status));
    }
    r.failed_step = StringField(rec, "failed_step", i);
    r.error = StringField(rec, "error", i);
    if (r.end < r.start) {
      ++out.rejected;
      continue;
    }
    records.push_back(std::move(r));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const WorkloadRecord& a, const WorkloadRecord& b) {
                     return a.start < b.start;
                   });

  out.durations.name = std::string(kDurationIndicator);
  out.durations.unit = "seconds";
  std::map<int64_t, HourCounts> hours;
  for (const WorkloadRecord& r : records) {
    const auto hour = static_cast<int64_t>(std::floor(r.start / kSecondsPerHour));
    HourCounts& hc = hours[hour];
    hc.hour = hour;
    if (r.success) {
      ++hc.success;
      double t = r.start;
      if (!out.durations.samples.empty() &&
          t <= out.durations.samples.back().timestamp) {
        t = std::nextafter(out.durations.samples.back().timestamp,
                           std::numeric_limits<double>::infinity());
      }
      out.durations.samples.push_back({t, r.end - r.start});
    } else {
      ++hc.failed;
      const std::string error = r.error.empty() ? "unknown" : r.error;
      out.errors.push_back({r.end, r.failed_step.empty() ? "-" : r.failed_step,
                            error, false, IsOverloadError(error)});
    }
  }
  for (const auto& [hour, hc] : hours) out.hourly_counts.push_back(hc);
  return out;
}

IngestedWorkloads IngestWorkloadReportFile(const std::filesystem::path& path,
                                           double origin) {
  return IngestWorkloadReport(ReadAll(path), origin);
}

std::string WorkloadReportJson(std::span<const WorkloadResult> results) {
  Json list = Json::array();
  for (const WorkloadResult& r : results) {
    Json rec;
    rec["stream"] = r.stream;
    rec["start"] = internal::Round9(r.start);
    rec["end"] = internal::Round9(r.end);
    const bool ok = r.classification == Classification::kSuccess;
    rec["status"] = ok ? "success" : "failed";
    rec["classification"] = ClassificationName(r.classification);
    if (r.error) {
      rec["failed_step"] = r.error->step;
      rec["error"] = r.error->name;
    }
    rec["leftovers"] = r.TotalLeftovers();
    list.push_back(std::move(rec));
  }
  Json doc;
  doc["workloads"] = std::move(list);
  return doc.dump() + "\n";
}

}  // namespace agesim
