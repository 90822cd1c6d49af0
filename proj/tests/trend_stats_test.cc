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
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "agesim/errors.h"
#include "oracles.h"

namespace agesim {
namespace {

const std::vector<double> kNoBounds;

IndicatorSeries Series(std::vector<Sample> samples) {
  return {"test_gigabytes", "gigabytes", std::move(samples)};
}

std::vector<double> Ascending(int n) {
  std::vector<double> v;
  for (int i = 1; i <= n; ++i) v.push_back(i);
  return v;
}

TEST(BinHourlyTest, MeanOfOneHour) {
  const HourlySeries h = BinHourly(Series({{10, 2}, {100, 4}}), kNoBounds);
  ASSERT_EQ(h.bins.size(), 1u);
  EXPECT_EQ(h.bins[0].hour, 0);
  EXPECT_DOUBLE_EQ(h.bins[0].mean, 3.0);
  EXPECT_EQ(h.bins[0].count, 2);
}

TEST(BinHourlyTest, EmptyHoursHaveNoBin) {
  const HourlySeries h = BinHourly(Series({{5, 1}, {7300, 2}}), kNoBounds);
  ASSERT_EQ(h.bins.size(), 2u);
  EXPECT_EQ(h.bins[0].hour, 0);
  EXPECT_EQ(h.bins[1].hour, 2);
  EXPECT_EQ(h.Find(1), nullptr);
}

TEST(BinHourlyTest, LinearRampMatchesOracle) {
  std::vector<Sample> samples;
  for (double t = 0; t < 24 * 3600.0; t += 30) samples.push_back({t, t / 3600});
  const HourlySeries h = BinHourly(Series(samples), kNoBounds);
  ASSERT_EQ(h.bins.size(), 24u);
  for (const HourBin& bin : h.bins) {
    EXPECT_EQ(bin.count, 120);
    EXPECT_NEAR(bin.mean, oracle::RampHourMean(bin.hour, 30), 1e-12);
    // The closed-form offset is exactly 1/240; allow rounding on top.
    EXPECT_NEAR(bin.mean, bin.hour + 0.5, 1.0 / 240 + 1e-12);
  }
}

TEST(BinHourlyTest, EmptySeriesThrows) {
  EXPECT_THROW(BinHourly(Series({}), kNoBounds), EmptySeriesError);
}

TEST(BinHourlyTest, UnsortedBoundariesThrow) {
  const std::vector<double> b = {7200, 3600};
  EXPECT_THROW(BinHourly(Series({{1, 1}}), b), Error);
}

TEST(BinHourlyTest, PhaseMarksFromBoundaries) {
  std::vector<Sample> samples;
  for (int h = 0; h < 26; ++h) samples.push_back({h * 3600.0 + 60, 1.0 * h});
  const std::vector<double> b = {24 * 3600.0, 25 * 3600.0};
  const HourlySeries h = BinHourly(Series(samples), b);
  EXPECT_EQ(h.marks.rejuvenation_hours, std::vector<int64_t>{24});
  EXPECT_EQ(h.marks.post_rejuvenation_hours, std::vector<int64_t>{25});
  EXPECT_EQ(h.StressMeans().size(), 24u);
}

TEST(MannKendallTest, StrictlyIncreasing) {
  const TrendTestResult r = MannKendall(Ascending(12));
  EXPECT_EQ(r.s_statistic, 66);
  EXPECT_GT(r.z_score, 1.96);
  EXPECT_EQ(r.verdict, Verdict::kUpward);
  EXPECT_EQ(r.n, 12);
  EXPECT_DOUBLE_EQ(r.alpha, 0.05);
}

TEST(MannKendallTest, AllTied) {
  const std::vector<double> v(12, 4.2);
  const TrendTestResult r = MannKendall(v);
  EXPECT_EQ(r.s_statistic, 0);
  EXPECT_EQ(r.variance, 0.0);
  EXPECT_EQ(r.z_score, 0.0);
  EXPECT_EQ(r.verdict, Verdict::kNoTrend);
}

TEST(MannKendallTest, NineValuesAreInsufficient) {
  const TrendTestResult r = MannKendall(Ascending(9));
  EXPECT_EQ(r.verdict, Verdict::kInsufficientData);
  EXPECT_EQ(r.s_statistic, 36);
  EXPECT_EQ(MannKendall(Ascending(10)).verdict, Verdict::kUpward);
}

TEST(MannKendallTest, EmptyInput) {
  const TrendTestResult r = MannKendall({});
  EXPECT_EQ(r.n, 0);
  EXPECT_EQ(r.s_statistic, 0);
  EXPECT_EQ(r.verdict, Verdict::kInsufficientData);
}

TEST(MannKendallTest, TiedSeriesMatchBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(10, 50);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> x = oracle::TiedSeries(rng, len(rng), 4);
    const TrendTestResult r = MannKendall(x);
    ASSERT_EQ(r.s_statistic, oracle::MannKendallS(x));
    ASSERT_EQ(r.variance, oracle::MannKendallVariance(x));
    ASSERT_EQ(r.verdict, oracle::MannKendallVerdict(x));
  }
}

TEST(MannKendallTest, VerdictBoundaryIsStrict) {
  EXPECT_EQ(TrendVerdict(1.96, 10), Verdict::kNoTrend);
  EXPECT_EQ(TrendVerdict(-1.96, 10), Verdict::kNoTrend);
  EXPECT_EQ(TrendVerdict(std::nextafter(1.96, 2.0), 10), Verdict::kUpward);
  EXPECT_EQ(TrendVerdict(std::nextafter(-1.96, -2.0), 10), Verdict::kDownward);
  EXPECT_EQ(TrendVerdict(5.0, 9), Verdict::kInsufficientData);
}

TEST(MannKendallPropertyTest, ReversalNegatesS) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x = oracle::TiedSeries(rng, 5 + trial % 40, 6);
    const int64_t s = MannKendall(x).s_statistic;
    std::reverse(x.begin(), x.end());
    EXPECT_EQ(MannKendall(x).s_statistic, -s);
  }
}

TEST(MannKendallPropertyTest, MonotoneExtremes) {
  for (int n = 2; n < 40; ++n) {
    std::vector<double> x = Ascending(n);
    EXPECT_EQ(MannKendall(x).s_statistic, n * (n - 1) / 2);
    std::reverse(x.begin(), x.end());
    EXPECT_EQ(MannKendall(x).s_statistic, -n * (n - 1) / 2);
  }
}

TEST(MannKendallPropertyTest, ShiftAndScaleInvariance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> x = oracle::TiedSeries(rng, 10 + trial % 30, 8);
    std::vector<double> shifted = x, scaled = x;
    for (double& v : shifted) v += 17.0;
    for (double& v : scaled) v *= 4.0;
    const TrendTestResult a = MannKendall(x);
    const TrendTestResult b = MannKendall(shifted);
    const TrendTestResult c = MannKendall(scaled);
    EXPECT_EQ(a.s_statistic, b.s_statistic);
    EXPECT_EQ(a.variance, b.variance);
    EXPECT_EQ(a.z_score, b.z_score);
    EXPECT_EQ(a.verdict, c.verdict);
    EXPECT_EQ(SensSlope(x), SensSlope(shifted));
    EXPECT_EQ(SensSlope(scaled), 4.0 * SensSlope(x));
  }
}

TEST(SensSlopeTest, Constant) {
  EXPECT_EQ(SensSlope(std::vector<double>{5, 5, 5, 5}), 0.0);
}

TEST(SensSlopeTest, LinearRamp) {
  EXPECT_EQ(SensSlope(std::vector<double>{1, 3, 5, 7}, 1.0), 2.0);
  EXPECT_EQ(SensSlope(std::vector<double>{1, 3, 5, 7}, 0.5), 4.0);
}

TEST(SensSlopeTest, TooShort) {
  EXPECT_THROW(SensSlope(std::vector<double>{1.0}), InsufficientDataError);
  EXPECT_THROW(SensSlope({}), InsufficientDataError);
}

TEST(SensSlopeTest, MatchesPairEnumeration) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(3, 30);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> x = oracle::RealSeries(rng, len(rng));
    const double expected = oracle::SensSlope(x);
    EXPECT_NEAR(SensSlope(x), expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(AgeingSummaryTest, Definition) {
  std::vector<Sample> s = {{0, 1.0}, {3600, 2.0}, {7200, 3.0}, {3 * 3600.0 + 1, 9},
                           {4 * 3600.0 + 1, 1.0}};
  const std::vector<double> b = {3 * 3600.0, 4 * 3600.0};
  const AgeingSummary a = SummarizeAgeing(BinHourly(Series(s), b));
  EXPECT_EQ(a.v0, 1.0);
  EXPECT_EQ(a.vb, 3.0);
  EXPECT_EQ(a.vr, 1.0);
  EXPECT_EQ(a.ageing, 2.0);
  EXPECT_EQ(a.rejuvenation, 2.0);
  ASSERT_TRUE(a.sens_slope.has_value());
  EXPECT_EQ(*a.sens_slope, 1.0);
}

TEST(AgeingSummaryTest, NegativeRejuvenation) {
  std::vector<Sample> s = {{0, 2.0}, {3600, 2.0}, {2 * 3600.0 + 5, 2.5}};
  const std::vector<double> b = {2 * 3600.0, 2 * 3600.0};
  const AgeingSummary a = SummarizeAgeing(BinHourly(Series(s), b));
  EXPECT_EQ(a.ageing, 0.0);
  EXPECT_EQ(a.rejuvenation, -0.5);
}

TEST(AgeingSummaryTest, RampOverOneDay) {
  std::vector<Sample> s;
  for (int h = 0; h < 24; ++h) s.push_back({h * 3600.0, h / 10.0});
  s.push_back({25 * 3600.0, 0.1});
  const std::vector<double> b = {24 * 3600.0, 25 * 3600.0};
  const AgeingSummary a = SummarizeAgeing(BinHourly(Series(s), b));
  EXPECT_EQ(a.ageing, 2.3);
  EXPECT_EQ(a.ageing, a.vb - a.v0);
  EXPECT_EQ(a.rejuvenation, a.vb - a.vr);
  EXPECT_NEAR(*a.sens_slope, 0.1, 1e-9);
}

TEST(AgeingSummaryTest, MissingPostBinNamesIt) {
  std::vector<Sample> s = {{0, 1.0}, {3600, 2.0}};
  try {
    SummarizeAgeing(BinHourly(Series(s), kNoBounds));
    FAIL() << "expected MissingPhaseBinError";
  } catch (const MissingPhaseBinError& e) {
    EXPECT_NE(e.bin().find("post-rejuvenation"), std::string::npos);
  }
}

TEST(AgeingSummaryTest, MissingFirstStressHour) {
  std::vector<Sample> s = {{3700, 1.0}, {26 * 3600.0, 2.0}};
  const std::vector<double> b = {24 * 3600.0, 25 * 3600.0};
  EXPECT_THROW(SummarizeAgeing(BinHourly(Series(s), b)), MissingPhaseBinError);
}

TEST(ValidateSeriesTest, RejectsBadSeries) {
  EXPECT_NO_THROW(ValidateSeries(Series({{0, 1}, {1, 2}})));
  EXPECT_THROW(ValidateSeries(Series({{1, 1}, {1, 2}})), Error);
  EXPECT_THROW(ValidateSeries({"x", "", {{0, 1}}}), Error);
  EXPECT_THROW(ValidateSeries(Series({{0, NAN}})), Error);
}

}  // namespace
}  // namespace agesim
