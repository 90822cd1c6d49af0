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

#ifndef AGESIM_TREND_STATS_H_
#define AGESIM_TREND_STATS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Trend detection and quantification for ageing indicators.
//
// Raw indicator samples are reduced to hourly means, the stress-phase means
// are fed to the Mann-Kendall test, and Sen's slope estimates the rate of
// change per hour. Ageing A and rejuvenation R are the differences between
// the first and last stress hours and between the last stress hour and the
// post-rejuvenation hour.
//
// Everything in this header is a pure function of its arguments.

namespace agesim {

inline constexpr double kSecondsPerHour = 3600.0;

struct Sample {
  double timestamp = 0.0;  // seconds since scenario start
  double value = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// Timestamped samples of one ageing indicator. Timestamps are strictly
// increasing and the unit is one of "seconds", "gigabytes", "count".
struct IndicatorSeries {
  std::string name;
  std::string unit;
  std::vector<Sample> samples;

  friend bool operator==(const IndicatorSeries&,
                         const IndicatorSeries&) = default;
};

// Throws agesim::Error when the series violates its invariants.
void ValidateSeries(const IndicatorSeries& series);

enum class Phase { kStress, kWait, kRejuvenation, kPostRejuvenation };

std::string_view PhaseName(Phase phase);

// Half-open interval [start, end) of virtual time spent in one phase.
struct PhaseSpan {
  Phase phase = Phase::kStress;
  double start = 0.0;
  double end = 0.0;

  friend bool operator==(const PhaseSpan&, const PhaseSpan&) = default;
};

struct HourBin {
  int64_t hour = 0;
  double mean = 0.0;
  int64_t count = 0;
  Phase phase = Phase::kStress;
};

// Hour indices of populated bins outside the stress phase.
struct PhaseMarks {
  int64_t stress_start_hour = 0;
  std::vector<int64_t> wait_hours;
  std::vector<int64_t> rejuvenation_hours;
  std::vector<int64_t> post_rejuvenation_hours;
};

// Hourly means of a series. Hours without samples have no bin.
struct HourlySeries {
  std::vector<HourBin> bins;
  PhaseMarks marks;

  const HourBin* Find(int64_t hour) const;
  // Means of the stress bins in hour order; the input of trend tests.
  std::vector<double> StressMeans() const;
};

// Bins `series` by hour. `phase_boundaries` holds at most two timestamps:
// the end of the stress phase and the end of rejuvenation. Bins are assigned
// to the phase in which they start.
HourlySeries BinHourly(const IndicatorSeries& series,
                       std::span<const double> phase_boundaries);

// General form over an explicit phase timeline. Bins starting outside every
// span belong to the nearest span before them, or to the stress phase.
HourlySeries BinHourly(const IndicatorSeries& series,
                       std::span<const PhaseSpan> timeline);

enum class Verdict { kUpward, kDownward, kNoTrend, kInsufficientData };

std::string_view VerdictName(Verdict verdict);

inline constexpr int64_t kMinTrendSamples = 10;
inline constexpr double kTrendAlpha = 0.05;
inline constexpr double kTrendCriticalZ = 1.96;

struct TrendTestResult {
  int64_t s_statistic = 0;
  double variance = 0.0;
  double z_score = 0.0;
  Verdict verdict = Verdict::kInsufficientData;
  double alpha = kTrendAlpha;
  int64_t n = 0;
};

// Strict two-sided rule: |Z| = 1.96 is no trend.
Verdict TrendVerdict(double z_score, int64_t n);

// Mann-Kendall test with tie-corrected variance and continuity-corrected Z.
// Values must be finite. Series shorter than kMinTrendSamples still report
// S, var(S) and Z but their verdict is kInsufficientData.
TrendTestResult MannKendall(std::span<const double> values);

// Median of all pairwise slopes (x_j - x_i) / (j - i), divided by the
// spacing of consecutive values so the result is per hour. O(n^2) memory.
// Throws InsufficientDataError for fewer than two values.
double SensSlope(std::span<const double> values, double spacing_hours = 1.0);

struct AgeingSummary {
  double v0 = 0.0;  // first stress hour
  double vb = 0.0;  // last populated stress hour
  double vr = 0.0;  // first post-rejuvenation hour
  double ageing = 0.0;        // vb - v0
  double rejuvenation = 0.0;  // vb - vr
  // Per hour over the stress bins; absent with fewer than two stress bins.
  std::optional<double> sens_slope;
};

// Throws MissingPhaseBinError naming the first missing bin.
AgeingSummary SummarizeAgeing(const HourlySeries& binned);

}  // namespace agesim

#endif  // AGESIM_TREND_STATS_H_
