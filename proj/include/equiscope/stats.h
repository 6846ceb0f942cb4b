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

// Deterministic statistical primitives shared by every stage of an audit.
// All functions are pure and thread-safe.

#ifndef EQUISCOPE_STATS_H_
#define EQUISCOPE_STATS_H_

#include <span>
#include <string>
#include <vector>

namespace equiscope::stats {

// Model scores paired with binary outcomes.
struct ScoredSample {
  std::vector<double> scores;
  std::vector<int> labels;  // 0 or 1

  // Throws InvalidArgument on length mismatch or a label outside {0, 1}.
  void Validate() const;
};

// Number of significance levels a star string may express.
enum class StarScale {
  kThreeLevel,  // <0.01 *, <0.001 **, <0.0001 ***  (AUC comparisons)
  kTwoLevel,    // <0.01 *, <0.001 **                (self-consistency KS)
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::string stars;
};

// "", "*", "**" or "***" for the given p-value.
std::string SignificanceStars(double p_value,
                              StarScale scale = StarScale::kThreeLevel);

// Area under the ROC curve as the Mann-Whitney probability that a random
// positive outscores a random negative, ties counted as one half. Throws
// UndefinedMetricError when only one class is present.
double Auroc(std::span<const double> scores, std::span<const int> labels);
double Auroc(const ScoredSample& sample);

// Linear-interpolation quantile: h = (n - 1) q, interpolated between the
// floor and ceil order statistics. Throws InvalidArgument on empty input or q
// outside [0, 1].
double Quantile(std::span<const double> values, double q);

// Two-sided Welch unequal-variance t-test with Welch-Satterthwaite degrees of
// freedom. Both samples need at least two values. When both variances are
// zero the result is p = 1 for equal means and p = 0 otherwise.
TestResult WelchTTest(std::span<const double> a, std::span<const double> b);

// Two-sided Mann-Whitney U test, normal approximation with tie correction.
// statistic is U for sample a.
TestResult MannWhitneyUTest(std::span<const double> a,
                            std::span<const double> b);

// Two-sample Kolmogorov-Smirnov test. statistic = sup |F_a - F_b| over the
// merged sample; p-value from the asymptotic Kolmogorov distribution at
// sqrt(n_a n_b / (n_a + n_b)) * statistic. Stars use the two-level scale.
TestResult KsTwoSample(std::span<const double> a, std::span<const double> b);

// Survival function of the limiting Kolmogorov distribution, P(K > lambda).
double KolmogorovSurvival(double lambda);

// Integral of the empirical CDF of `values` over [lo, hi]. Values at or
// below lo act as mass at lo.
double CdfArea(std::span<const double> values, double lo, double hi);

double Mean(std::span<const double> values);
// Sample (n - 1) standard deviation; 0 for fewer than two values.
double SampleStdDev(std::span<const double> values);

}  // namespace equiscope::stats

#endif  // EQUISCOPE_STATS_H_
