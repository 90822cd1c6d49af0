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

#include "agesim/trend_stats.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "agesim/errors.h"

namespace agesim {
namespace {

// Sorts `values` in place and returns the number of pairs i < j (in the
// original order) with values[i] > values[j].
int64_t SortCountingInversions(std::vector<double>& values,
                               std::vector<double>& scratch, size_t lo,
                               size_t hi) {
  if (hi - lo < 2) return 0;
  const size_t mid = lo + (hi - lo) / 2;
  int64_t inversions = SortCountingInversions(values, scratch, lo, mid) +
                       SortCountingInversions(values, scratch, mid, hi);
  size_t i = lo;
  size_t j = mid;
  size_t out = lo;
  while (i < mid && j < hi) {
    // Equal values are taken from the left run, so only strict decreases
    // count as inversions.
    if (values[j] < values[i]) {
      inversions += static_cast<int64_t>(mid - i);
      scratch[out++] = values[j++];
    } else {
      scratch[out++] = values[i++];
    }
  }
  while (i < mid) scratch[out++] = values[i++];
  while (j < hi) scratch[out++] = values[j++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, values.begin() + lo);
  return inversions;
}

Phase PhaseAt(std::span<const PhaseSpan> timeline, double t) {
  const PhaseSpan* before = nullptr;
  for (const PhaseSpan& span : timeline) {
    if (t >= span.start && t < span.end) return span.phase;
    if (span.start <= t && (before == nullptr || span.start >= before->start)) {
      before = &span;
    }
  }
  return before != nullptr ? before->phase : Phase::kStress;
}

}  // namespace

void ValidateSeries(const IndicatorSeries& series) {
  if (series.unit.empty()) {
    throw Error(fmt::format("series '{}' has no unit", series.name));
  }
  for (size_t i = 0; i < series.samples.size(); ++i) {
    const Sample& s = series.samples[i];
    if (!std::isfinite(s.timestamp) || !std::isfinite(s.value)) {
      throw Error(fmt::format("series '{}': non-finite sample at index {}",
                              series.name, i));
    }
    if (i > 0 && !(series.samples[i - 1].timestamp < s.timestamp)) {
      throw Error(fmt::format(
          "series '{}': timestamps not strictly increasing at index {}",
          series.name, i));
    }
  }
}

std::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kStress:
      return "stress";
    case Phase::kWait:
      return "wait";
    case Phase::kRejuvenation:
      return "rejuvenation";
    case Phase::kPostRejuvenation:
      return "post-rejuvenation";
  }
  return "unknown";
}

std::string_view VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kUpward:
      return "upward";
    case Verdict::kDownward:
      return "downward";
    case Verdict::kNoTrend:
      return "no-trend";
    case Verdict::kInsufficientData:
      return "insufficient-data";
  }
  return "unknown";
}

const HourBin* HourlySeries::Find(int64_t hour) const {
  auto it = std::lower_bound(
      bins.begin(), bins.end(), hour,
      [](const HourBin& bin, int64_t h) { return bin.hour < h; });
  if (it == bins.end() || it->hour != hour) return nullptr;
  return &*it;
}

std::vector<double> HourlySeries::StressMeans() const {
  std::vector<double> means;
  for (const HourBin& bin : bins) {
    if (bin.phase == Phase::kStress) means.push_back(bin.mean);
  }
  return means;
}

HourlySeries BinHourly(const IndicatorSeries& series,
                       std::span<const double> phase_boundaries) {
  if (phase_boundaries.size() > 2) {
    throw Error("at most two phase boundaries (stress end, rejuvenation end)");
  }
  if (!std::is_sorted(phase_boundaries.begin(), phase_boundaries.end())) {
    throw Error("phase boundaries must be sorted");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<PhaseSpan> timeline;
  if (phase_boundaries.empty()) {
    timeline.push_back({Phase::kStress, 0.0, kInf});
  } else {
    timeline.push_back({Phase::kStress, 0.0, phase_boundaries[0]});
    if (phase_boundaries.size() == 1) {
      timeline.push_back({Phase::kRejuvenation, phase_boundaries[0], kInf});
    } else {
      timeline.push_back(
          {Phase::kRejuvenation, phase_boundaries[0], phase_boundaries[1]});
      timeline.push_back(
          {Phase::kPostRejuvenation, phase_boundaries[1], kInf});
    }
  }
  return BinHourly(series, std::span<const PhaseSpan>(timeline));
}

HourlySeries BinHourly(const IndicatorSeries& series,
                       std::span<const PhaseSpan> timeline) {
  if (series.samples.empty()) {
    throw EmptySeriesError(
        fmt::format("series '{}' has no samples", series.name));
  }
  // Sums are accumulated per hour in sample order so the mean is exactly
  // the arithmetic mean a caller would compute from the raw samples.
  std::map<int64_t, std::pair<double, int64_t>> sums;
  for (const Sample& s : series.samples) {
    const double hour = std::floor(s.timestamp / kSecondsPerHour);
    if (hour < 0) {
      throw Error(fmt::format("series '{}': negative timestamp {}",
                              series.name, s.timestamp));
    }
    auto& [sum, count] = sums[static_cast<int64_t>(hour)];
    sum += s.value;
    ++count;
  }

  HourlySeries out;
  for (const PhaseSpan& span : timeline) {
    if (span.phase == Phase::kStress) {
      out.marks.stress_start_hour =
          static_cast<int64_t>(std::floor(span.start / kSecondsPerHour));
      break;
    }
  }
  out.bins.reserve(sums.size());
  for (const auto& [hour, acc] : sums) {
    HourBin bin;
    bin.hour = hour;
    bin.count = acc.second;
    bin.mean = acc.first / static_cast<double>(acc.second);
    bin.phase = PhaseAt(timeline, static_cast<double>(hour) * kSecondsPerHour);
    switch (bin.phase) {
      case Phase::kStress:
        break;
      case Phase::kWait:
        out.marks.wait_hours.push_back(hour);
        break;
      case Phase::kRejuvenation:
        out.marks.rejuvenation_hours.push_back(hour);
        break;
      case Phase::kPostRejuvenation:
        out.marks.post_rejuvenation_hours.push_back(hour);
        break;
    }
    out.bins.push_back(bin);
  }
  return out;
}

Verdict TrendVerdict(double z_score, int64_t n) {
  if (n < kMinTrendSamples) return Verdict::kInsufficientData;
  if (z_score > kTrendCriticalZ) return Verdict::kUpward;
  if (z_score < -kTrendCriticalZ) return Verdict::kDownward;
  return Verdict::kNoTrend;
}

TrendTestResult MannKendall(std::span<const double> values) {
  TrendTestResult result;
  const int64_t n = static_cast<int64_t>(values.size());
  result.n = n;

  std::vector<double> sorted(values.begin(), values.end());
  std::vector<double> scratch(sorted.size());
  const int64_t discordant =
      SortCountingInversions(sorted, scratch, 0, sorted.size());

  // Tie groups come straight out of the sorted copy.
  int64_t tied_pairs = 0;
  int64_t tie_correction = 0;
  for (size_t i = 0; i < sorted.size();) {
    size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const int64_t t = static_cast<int64_t>(j - i);
    tied_pairs += t * (t - 1) / 2;
    tie_correction += t * (t - 1) * (2 * t + 5);
    i = j;
  }

  const int64_t pairs = n * (n - 1) / 2;
  const int64_t concordant = pairs - discordant - tied_pairs;
  result.s_statistic = concordant - discordant;
  result.variance =
      static_cast<double>(n * (n - 1) * (2 * n + 5) - tie_correction) / 18.0;

  const int64_t s = result.s_statistic;
  if (s == 0) {
    result.z_score = 0.0;
  } else {
    // All-tied input is the only way to get zero variance, and it forces
    // S = 0.
    assert(result.variance > 0.0);
    const double sd = std::sqrt(result.variance);
    result.z_score = s > 0 ? static_cast<double>(s - 1) / sd
                           : static_cast<double>(s + 1) / sd;
  }

  result.verdict = TrendVerdict(result.z_score, n);
  return result;
}

double SensSlope(std::span<const double> values, double spacing_hours) {
  const size_t n = values.size();
  if (n < 2) {
    throw InsufficientDataError(
        fmt::format("Sen's slope needs at least 2 values, got {}", n));
  }
  if (!(spacing_hours > 0.0)) {
    throw Error("Sen's slope spacing must be positive");
  }
  std::vector<double> slopes;
  slopes.reserve(n * (n - 1) / 2);
  for (size_t i = 0; i + 1 < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      slopes.push_back((values[j] - values[i]) / static_cast<double>(j - i));
    }
  }
  const size_t m = slopes.size();
  const size_t upper = m / 2;
  std::nth_element(slopes.begin(), slopes.begin() + upper, slopes.end());
  double median = slopes[upper];
  if (m % 2 == 0) {
    // Everything left of `upper` is <= it; the lower middle is their max.
    const double lower = *std::max_element(slopes.begin(),
                                           slopes.begin() + upper);
    median = (lower + median) / 2.0;
  }
  return median / spacing_hours;
}

AgeingSummary SummarizeAgeing(const HourlySeries& binned) {
  const HourBin* first = binned.Find(binned.marks.stress_start_hour);
  if (first == nullptr || first->phase != Phase::kStress) {
    throw MissingPhaseBinError(fmt::format("first stress hour ({})",
                                           binned.marks.stress_start_hour));
  }
  const HourBin* last = nullptr;
  for (const HourBin& bin : binned.bins) {
    if (bin.phase == Phase::kStress) last = &bin;
  }
  if (binned.marks.post_rejuvenation_hours.empty()) {
    throw MissingPhaseBinError("post-rejuvenation hour");
  }
  const HourBin* post = binned.Find(binned.marks.post_rejuvenation_hours[0]);

  AgeingSummary summary;
  summary.v0 = first->mean;
  summary.vb = last->mean;
  summary.vr = post->mean;
  summary.ageing = summary.vb - summary.v0;
  summary.rejuvenation = summary.vb - summary.vr;
  const std::vector<double> stress = binned.StressMeans();
  if (stress.size() >= 2) summary.sens_slope = SensSlope(stress);
  return summary;
}

}  // namespace agesim
