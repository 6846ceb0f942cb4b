// Copyright 2026 The Equiscope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "equiscope/stats.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "equiscope/errors.h"
#include "equiscope/random.h"
#include "testing/oracles.h"

namespace equiscope::stats {
namespace {

using ::equiscope::testing::BruteForceAuc;
using ::equiscope::testing::BruteForceKsGap;
using ::equiscope::testing::CdfAreaByBreakpoints;
using ::equiscope::testing::StudentTTwoSidedByQuadrature;

// Scores drawn from a small grid so ties are common.
ScoredSample RandomSample(Rng& rng, std::size_t n) {
  ScoredSample s;
  for (std::size_t i = 0; i < n; ++i) {
    s.scores.push_back(static_cast<double>(UniformIndex(rng, 7)) / 6.0);
    s.labels.push_back(static_cast<int>(UniformIndex(rng, 2)));
  }
  s.labels[0] = 1;
  s.labels[1] = 0;
  return s;
}

TEST(AurocTest, HandValue) {
  EXPECT_DOUBLE_EQ(Auroc(std::vector<double>{0.9, 0.4, 0.6, 0.2}, std::vector<int>{1, 1, 0, 0}),
                   0.75);
}

TEST(AurocTest, PerfectAndReversed) {
  const std::vector<int> y = {0, 0, 1, 1};
  EXPECT_EQ(Auroc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, y), 1.0);
  EXPECT_EQ(Auroc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, y), 0.0);
  EXPECT_EQ(Auroc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, y), 0.5);
}

TEST(AurocTest, SingleClassIsUndefined) {
  EXPECT_THROW(Auroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}),
               UndefinedMetricError);
}

TEST(AurocTest, RejectsBadInput) {
  EXPECT_THROW(Auroc(std::vector<double>{0.1}, std::vector<int>{1, 0}), InvalidArgument);
  EXPECT_THROW(Auroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 2}), InvalidArgument);
}

TEST(AurocTest, MatchesPairCounting) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const ScoredSample s = RandomSample(rng, 2 + UniformIndex(rng, 49));
    EXPECT_NEAR(Auroc(s), BruteForceAuc(s.scores, s.labels), 1e-12);
  }
}

TEST(AurocTest, InvariantUnderMonotoneTransform) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    ScoredSample s = RandomSample(rng, 30);
    const double before = Auroc(s);
    for (double& v : s.scores) v = std::exp(3.0 * v) - 2.0;
    EXPECT_DOUBLE_EQ(Auroc(s), before);
  }
}

TEST(AurocTest, LabelFlipComplements) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    ScoredSample s = RandomSample(rng, 25);
    const double before = Auroc(s);
    for (int& y : s.labels) y = 1 - y;
    EXPECT_NEAR(Auroc(s), 1.0 - before, 1e-12);
  }
}

TEST(SignificanceStarsTest, ThreeLevel) {
  EXPECT_EQ(SignificanceStars(0.05), "");
  EXPECT_EQ(SignificanceStars(0.01), "");
  EXPECT_EQ(SignificanceStars(0.005), "*");
  EXPECT_EQ(SignificanceStars(0.0005), "**");
  EXPECT_EQ(SignificanceStars(0.00005), "***");
}

TEST(SignificanceStarsTest, TwoLevelCaps) {
  EXPECT_EQ(SignificanceStars(0.005, StarScale::kTwoLevel), "*");
  EXPECT_EQ(SignificanceStars(0.00005, StarScale::kTwoLevel), "**");
}

TEST(QuantileTest, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(Quantile(std::vector<double>{4, 1, 3, 2}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(Quantile(std::vector<double>{1, 2, 3, 4}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(Quantile(std::vector<double>{1, 2, 3, 4}, 1.0), 4.0);
  EXPECT_THROW(Quantile(std::vector<double>{}, 0.5), InvalidArgument);
}

TEST(WelchTest, HandValue) {
  const TestResult r = WelchTTest(std::vector<double>{1, 2, 3, 4, 5},
                                  std::vector<double>{2, 3, 4, 5, 6});
  EXPECT_NEAR(r.statistic, -1.0, 1e-12);
  EXPECT_NEAR(r.p_value, StudentTTwoSidedByQuadrature(-1.0, 8.0), 1e-6);
  EXPECT_NEAR(r.p_value, 0.34659, 1e-4);
  EXPECT_EQ(r.stars, "");
}

TEST(WelchTest, MatchesQuadratureOnUnequalVariances) {
  const std::vector<double> a = {0.61, 0.64, 0.70, 0.66, 0.59, 0.63};
  const std::vector<double> b = {0.71, 0.69, 0.80, 0.74, 0.66, 0.77, 0.72, 0.81};
  const TestResult r = WelchTTest(a, b);
  // Welch-Satterthwaite degrees of freedom, recomputed here.
  auto var = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
  };
  const double sa = var(a) / 6.0, sb = var(b) / 8.0;
  const double df = (sa + sb) * (sa + sb) / (sa * sa / 5.0 + sb * sb / 7.0);
  EXPECT_NEAR(r.p_value, StudentTTwoSidedByQuadrature(r.statistic, df), 1e-6);
}

TEST(WelchTest, Degenerate) {
  const TestResult same = WelchTTest(std::vector<double>{1, 1}, std::vector<double>{1, 1});
  EXPECT_EQ(same.p_value, 1.0);
  const TestResult apart = WelchTTest(std::vector<double>{1, 1}, std::vector<double>{2, 2});
  EXPECT_EQ(apart.p_value, 0.0);
  EXPECT_TRUE(std::isinf(apart.statistic));
  EXPECT_THROW(WelchTTest(std::vector<double>{1}, std::vector<double>{1, 2}), InvalidArgument);
}

TEST(MannWhitneyTest, SeparatedSamples) {
  std::vector<double> a, b;
  for (int i = 0; i < 20; ++i) {
    a.push_back(i);
    b.push_back(100 + i);
  }
  const TestResult r = MannWhitneyUTest(a, b);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_LT(r.p_value, 1e-6);
  EXPECT_EQ(MannWhitneyUTest(a, a).p_value, 1.0);
}

TEST(KsTest, HandValue) {
  const TestResult r = KsTwoSample(std::vector<double>{1, 3, 5}, std::vector<double>{2, 4, 6});
  EXPECT_NEAR(r.statistic, 1.0 / 3.0, 1e-15);
}

TEST(KsTest, IdenticalAndDisjoint) {
  const std::vector<double> a = {0.1, 0.5, 0.5, 0.9};
  EXPECT_EQ(KsTwoSample(a, a).statistic, 0.0);
  EXPECT_EQ(KsTwoSample(a, a).p_value, 1.0);
  EXPECT_EQ(KsTwoSample(a, std::vector<double>{2, 3}).statistic, 1.0);
}

TEST(KsTest, MatchesBruteForce) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(1 + UniformIndex(rng, 100)), b(1 + UniformIndex(rng, 100));
    for (double& v : a) v = static_cast<double>(UniformIndex(rng, 20));
    for (double& v : b) v = static_cast<double>(UniformIndex(rng, 25));
    EXPECT_NEAR(KsTwoSample(a, b).statistic, BruteForceKsGap(a, b), 1e-12);
  }
}

TEST(KsTest, SurvivalFunctionKnownPoints) {
  // Tabulated Kolmogorov distribution values.
  EXPECT_NEAR(KolmogorovSurvival(1.36), 0.0494, 2e-4);
  EXPECT_NEAR(KolmogorovSurvival(1.63), 0.0098, 2e-4);
  EXPECT_NEAR(KolmogorovSurvival(0.5), 0.9639, 2e-4);
  // Both series branches agree near the switch point.
  EXPECT_NEAR(KolmogorovSurvival(1.1799999), KolmogorovSurvival(1.18), 1e-6);
  EXPECT_EQ(KolmogorovSurvival(0.0), 1.0);
}

TEST(CdfAreaTest, HandValues) {
  EXPECT_DOUBLE_EQ(CdfArea(std::vector<double>{0.5, 1.0}, 0.5, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(CdfArea(std::vector<double>{1.0, 1.0}, 0.5, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(CdfArea(std::vector<double>{0.2, 0.4}, 0.5, 1.0), 0.5);
}

TEST(CdfAreaTest, MatchesBreakpointIntegration) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + UniformIndex(rng, 40));
    for (double& x : v) x = 0.3 + 0.7 * UniformUnit(rng);
    EXPECT_NEAR(CdfArea(v, 0.5, 1.0), CdfAreaByBreakpoints(v, 0.5, 1.0), 1e-12);
  }
}

TEST(CdfAreaTest, GrowsWhenAValueDrops) {
  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(2 + UniformIndex(rng, 30));
    for (double& x : v) x = 0.5 + 0.5 * UniformUnit(rng);
    const double before = CdfArea(v, 0.5, 1.0);
    const std::size_t i = UniformIndex(rng, v.size());
    v[i] = 0.5 + (v[i] - 0.5) * 0.5;
    EXPECT_GE(CdfArea(v, 0.5, 1.0), before);
  }
}

}  // namespace
}  // namespace equiscope::stats
