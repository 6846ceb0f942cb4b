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

// Data-complexity metrics, oriented so that larger means harder:
//
//   f1  1 / (1 + max Fisher discriminant ratio)
//   l1  S / (1 + S), S the mean hinge loss of a fitted linear separator
//   n3  leave-one-out 1-NN error rate
//   t2  features per row
//   ir  majority count / minority count
//
// l1 and n3 standardize features and impute missing entries with the column
// mean; f1 uses the non-missing values of each column.

#ifndef EQUISCOPE_COMPLEXITY_H_
#define EQUISCOPE_COMPLEXITY_H_

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "equiscope/dataset.h"
#include "equiscope/evaluation.h"
#include "equiscope/json_io.h"

namespace equiscope::complexity {

// Stand-in for an infinite Fisher ratio (a feature separating two
// zero-variance classes), keeping f1 strictly positive.
inline constexpr double kSeparatingFisherRatio = 1e12;

// The metrics below throw UndefinedMetricError when the labels hold a single
// class (n3 and t2 excepted) and InvalidArgument on shape mismatches.
double F1MaxFisher(const FeatureMatrix& features, std::span<const int> labels);
double L1LinearError(const FeatureMatrix& features, std::span<const int> labels);
double N3NearestNeighborError(const FeatureMatrix& features, std::span<const int> labels);
double T2FeaturesPerPoint(std::size_t n_features, std::size_t n_points);
double ImbalanceRatio(std::span<const int> labels);

// Column-wise z-scores with missing entries set to the column mean (0 after
// scaling). Constant or all-missing columns become zeros. Column means are
// summed in sorted order so the result does not depend on row order.
std::vector<double> StandardizeImputed(const FeatureMatrix& features);

using MetricFn = std::function<double(const FeatureMatrix&, std::span<const int>)>;

struct Metric {
  std::string name;
  MetricFn fn;
};

// Ordered metric table. Default() holds f1, l1, n3, t2 and ir; more metrics
// can be appended under new names.
class MetricRegistry {
 public:
  static MetricRegistry Default();

  // Throws InvalidArgument when the name is already taken.
  void Register(std::string name, MetricFn fn);
  const std::vector<Metric>& metrics() const { return metrics_; }
  std::vector<std::string> Names() const;

 private:
  std::vector<Metric> metrics_;
};

struct ComplexityReport {
  Group group = Group::kOverall;
  std::size_t n_rows = 0;
  std::map<std::string, double> values;
  // Metrics that could not be computed, with the reason.
  std::map<std::string, std::string> undefined;
};

// One report per non-empty group, computed on the group's rows of the
// awareness view only.
std::map<Group, ComplexityReport> ComputeReports(const TabularDataset& dataset,
                                                 Awareness awareness,
                                                 const MetricRegistry& registry =
                                                     MetricRegistry::Default());

// +1 when both deltas share a sign, -1 when they differ, 0 when either is 0.
int ConsistencySign(double delta_auc, double delta_cm);

struct ConsistencyCell {
  std::string dataset;
  std::string metric;
  Attribute attribute = Attribute::kSex;
  double delta_auc = 0.0;  // mean AUC of A minus mean AUC of B
  double delta_cm = 0.0;   // metric of B minus metric of A
  int ratio_sign = 0;
};

struct OmittedCell {
  std::string dataset;
  std::string metric;
  Attribute attribute = Attribute::kSex;
  std::string reason;
};

struct ConsistencyMatrix {
  std::vector<ConsistencyCell> cells;
  std::vector<OmittedCell> omitted;
};

// One cell per (attribute, metric) for the (A, B) pair of each disparity.
ConsistencyMatrix BuildConsistencyMatrix(
    const std::string& dataset_id, const std::vector<eval::DisparityRecord>& disparities,
    const std::map<Group, ComplexityReport>& reports,
    const std::vector<std::string>& metric_names);

Json ToJson(const ComplexityReport& report);
Json ToJson(const ConsistencyMatrix& matrix);

// Heatmap rows "dataset,attribute,<metric>..." with cells +1, -1, 0 or empty.
void WriteHeatmapHeader(std::ostream& out, const std::vector<std::string>& metric_names);
void WriteHeatmapRows(std::ostream& out, const ConsistencyMatrix& matrix,
                      const std::vector<std::string>& metric_names);

}  // namespace equiscope::complexity

#endif  // EQUISCOPE_COMPLEXITY_H_
