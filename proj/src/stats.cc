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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "boost/math/distributions/normal.hpp"
#include "boost/math/distributions/students_t.hpp"
#include "equiscope/errors.h"

namespace equiscope::stats {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mid-ranks (1-based) of the concatenation of a and b.
std::vector<double> MidRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] < values[j];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Ranks i+1 .. j+1 share their average.
    const double rank = 0.5 * static_cast<double>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double SampleVariance(std::span<const double> values, double mean) {
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

}  // namespace

void ScoredSample::Validate() const {
  if (scores.size() != labels.size()) {
    throw InvalidArgument("scores and labels differ in length");
  }
  for (const int label : labels) {
    if (label != 0 && label != 1) {
      throw InvalidArgument("labels must be 0 or 1");
    }
  }
}

std::string SignificanceStars(double p_value, StarScale scale) {
  if (scale == StarScale::kThreeLevel && p_value < 0.0001) return "***";
  if (p_value < 0.001) return "**";
  if (p_value < 0.01) return "*";
  return "";
}

double Auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw InvalidArgument("scores and labels differ in length");
  }
  std::size_t n_pos = 0;
  for (const int label : labels) {
    if (label != 0 && label != 1) throw InvalidArgument("labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(label);
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw UndefinedMetricError("undefined AUC: sample has a single class");
  }
  const std::vector<double> ranks = MidRanks(scores);
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) positive_rank_sum += ranks[i];
  }
  const double np = static_cast<double>(n_pos);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double Auroc(const ScoredSample& sample) {
  return Auroc(sample.scores, sample.labels);
}

double Quantile(std::span<const double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile q outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double Mean(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double SampleStdDev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  return std::sqrt(SampleVariance(values, Mean(values)));
}

TestResult WelchTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InvalidArgument("Welch t-test needs at least two values per sample");
  }
  const double mean_a = Mean(a);
  const double mean_b = Mean(b);
  const double se2_a = SampleVariance(a, mean_a) / static_cast<double>(a.size());
  const double se2_b = SampleVariance(b, mean_b) / static_cast<double>(b.size());
  const double se2 = se2_a + se2_b;

  TestResult result;
  if (se2 == 0.0) {
    if (mean_a == mean_b) {
      result.statistic = 0.0;
      result.p_value = 1.0;
    } else {
      result.statistic = mean_a > mean_b ? kInf : -kInf;
      result.p_value = 0.0;
    }
  } else {
    result.statistic = (mean_a - mean_b) / std::sqrt(se2);
    const double df =
        se2 * se2 /
        (se2_a * se2_a / static_cast<double>(a.size() - 1) +
         se2_b * se2_b / static_cast<double>(b.size() - 1));
    const boost::math::students_t dist(df);
    result.p_value = std::min(
        1.0, 2.0 * boost::math::cdf(boost::math::complement(
                       dist, std::fabs(result.statistic))));
  }
  result.stars = SignificanceStars(result.p_value);
  return result;
}

TestResult MannWhitneyUTest(std::span<const double> a,
                            std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw InvalidArgument("Mann-Whitney test needs non-empty samples");
  }
  std::vector<double> merged(a.begin(), a.end());
  merged.insert(merged.end(), b.begin(), b.end());
  const std::vector<double> ranks = MidRanks(merged);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) rank_sum_a += ranks[i];

  // Tie correction term: sum over tie groups of (t^3 - t).
  std::vector<double> sorted = merged;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  TestResult result;
  result.statistic = rank_sum_a - na * (na + 1.0) / 2.0;
  const double mean_u = na * nb / 2.0;
  const double var_u = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var_u <= 0.0) {
    result.p_value = 1.0;
  } else {
    const double z = std::fabs(result.statistic - mean_u) / std::sqrt(var_u);
    const boost::math::normal standard;
    result.p_value =
        std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(standard, z)));
  }
  result.stars = SignificanceStars(result.p_value);
  return result;
}

double KolmogorovSurvival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double survival;
  if (lambda < 1.18) {
    // Jacobi-theta form converges fast for small lambda.
    const double w = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      sum += std::exp(-odd * odd * w);
    }
    survival = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  } else {
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      sum += (k % 2 == 1) ? term : -term;
      if (term < 1e-300) break;
    }
    survival = 2.0 * sum;
  }
  return std::clamp(survival, 0.0, 1.0);
}

TestResult KsTwoSample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw InvalidArgument("KS test needs non-empty samples");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());

  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  // Once one sample is exhausted its CDF is 1; the other only rises towards
  // 1, so the last gap evaluated above is already the largest remaining one.

  TestResult result;
  result.statistic = d;
  const double effective = na * nb / (na + nb);
  result.p_value = KolmogorovSurvival(std::sqrt(effective) * d);
  result.stars = SignificanceStars(result.p_value, StarScale::kTwoLevel);
  return result;
}

double CdfArea(std::span<const double> values, double lo, double hi) {
  if (values.empty()) throw InvalidArgument("CDF area of empty sample");
  if (!(lo < hi)) throw InvalidArgument("CDF area needs lo < hi");
  // F(t) = #{v <= t} / n, so the integral over [lo, hi] is the mean of
  // (hi - max(v, lo)) over values below hi.
  double area = 0.0;
  for (const double v : values) {
    if (v < hi) area += hi - std::max(v, lo);
  }
  return area / static_cast<double>(values.size());
}

}  // namespace equiscope::stats
