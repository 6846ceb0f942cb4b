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

#include "equiscope/complexity.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "equiscope/csv.h"
#include "equiscope/errors.h"
#include "equiscope/parallel.h"

namespace equiscope::complexity {
namespace {

constexpr int kL1Epochs = 500;
constexpr double kL1Step = 0.01;

void CheckShape(const FeatureMatrix& features, std::span<const int> labels) {
  if (labels.size() != features.rows) {
    throw InvalidArgument("label count " + std::to_string(labels.size()) +
                          " does not match row count " + std::to_string(features.rows));
  }
  for (const int y : labels) {
    if (y != 0 && y != 1) throw InvalidArgument("labels must be 0 or 1");
  }
}

std::size_t CountPositives(std::span<const int> labels) {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

void RequireBothClasses(std::span<const int> labels, const char* metric) {
  const std::size_t pos = CountPositives(labels);
  if (pos == 0 || pos == labels.size()) {
    throw UndefinedMetricError(std::string(metric) + " needs both classes");
  }
}

// Sum in ascending order, so the total is independent of input order.
double SortedSum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum;
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // population
  std::size_t n = 0;
};

Moments MomentsOf(std::vector<double> values) {
  Moments m;
  m.n = values.size();
  if (m.n == 0) return m;
  m.mean = SortedSum(values) / static_cast<double>(m.n);
  for (double& v : values) v = (v - m.mean) * (v - m.mean);
  m.variance = SortedSum(std::move(values)) / static_cast<double>(m.n);
  return m;
}

double Hinge(double margin) { return margin < 1.0 ? 1.0 - margin : 0.0; }

}  // namespace

double F1MaxFisher(const FeatureMatrix& features, std::span<const int> labels) {
  CheckShape(features, labels);
  RequireBothClasses(labels, "f1");
  double max_ratio = 0.0;
  for (std::size_t c = 0; c < features.cols; ++c) {
    std::vector<double> by_class[2];
    for (std::size_t r = 0; r < features.rows; ++r) {
      if (!features.IsMissing(r, c)) by_class[labels[r]].push_back(features.At(r, c));
    }
    if (by_class[0].empty() || by_class[1].empty()) continue;
    const Moments m0 = MomentsOf(std::move(by_class[0]));
    const Moments m1 = MomentsOf(std::move(by_class[1]));
    const double gap = (m1.mean - m0.mean) * (m1.mean - m0.mean);
    const double spread = m0.variance + m1.variance;
    double ratio = 0.0;
    if (spread > 0.0) {
      ratio = gap / spread;
    } else if (gap > 0.0) {
      ratio = kSeparatingFisherRatio;
    }
    max_ratio = std::max(max_ratio, std::min(ratio, kSeparatingFisherRatio));
  }
  return 1.0 / (1.0 + max_ratio);
}

std::vector<double> StandardizeImputed(const FeatureMatrix& features) {
  std::vector<double> z(features.rows * features.cols, 0.0);
  for (std::size_t c = 0; c < features.cols; ++c) {
    std::vector<double> present;
    for (std::size_t r = 0; r < features.rows; ++r) {
      if (!features.IsMissing(r, c)) present.push_back(features.At(r, c));
    }
    const Moments m = MomentsOf(std::move(present));
    if (m.n == 0 || !(m.variance > 0.0)) continue;
    const double sd = std::sqrt(m.variance);
    for (std::size_t r = 0; r < features.rows; ++r) {
      if (!features.IsMissing(r, c)) {
        z[r * features.cols + c] = (features.At(r, c) - m.mean) / sd;
      }
    }
  }
  return z;
}

double L1LinearError(const FeatureMatrix& features, std::span<const int> labels) {
  CheckShape(features, labels);
  RequireBothClasses(labels, "l1");
  const std::size_t n = features.rows;
  const std::size_t m = features.cols;
  const std::vector<double> z = StandardizeImputed(features);

  // Canonical row order makes every floating-point sum order-independent.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto za = z.begin() + static_cast<std::ptrdiff_t>(a * m);
    const auto zb = z.begin() + static_cast<std::ptrdiff_t>(b * m);
    if (std::lexicographical_compare(za, za + static_cast<std::ptrdiff_t>(m), zb,
                                     zb + static_cast<std::ptrdiff_t>(m))) {
      return true;
    }
    if (std::equal(za, za + static_cast<std::ptrdiff_t>(m), zb)) {
      return labels[a] < labels[b];
    }
    return false;
  });

  std::vector<double> w(m, 0.0), grad_w(m);
  double b = 0.0;
  double best = static_cast<double>(n);  // objective at w = 0, b = 0
  for (int epoch = 1; epoch <= kL1Epochs + 1; ++epoch) {
    double objective = 0.0;
    double grad_b = 0.0;
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    for (const std::size_t r : order) {
      const double y = labels[r] == 1 ? 1.0 : -1.0;
      const double* x = &z[r * m];
      double score = b;
      for (std::size_t c = 0; c < m; ++c) score += w[c] * x[c];
      const double loss = Hinge(y * score);
      objective += loss;
      if (loss > 0.0) {
        for (std::size_t c = 0; c < m; ++c) grad_w[c] -= y * x[c];
        grad_b -= y;
      }
    }
    best = std::min(best, objective);
    if (best == 0.0 || epoch > kL1Epochs) break;
    const double step = kL1Step / std::sqrt(static_cast<double>(epoch));
    for (std::size_t c = 0; c < m; ++c) w[c] -= step * grad_w[c];
    b -= step * grad_b;
  }
  const double s = best / static_cast<double>(n);
  return s / (1.0 + s);
}

double N3NearestNeighborError(const FeatureMatrix& features, std::span<const int> labels) {
  CheckShape(features, labels);
  const std::size_t n = features.rows;
  const std::size_t m = features.cols;
  if (n < 2) throw InvalidArgument("n3 needs at least two rows");
  const std::vector<double> z = StandardizeImputed(features);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t nearest = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        const double diff = z[i * m + c] - z[j * m + c];
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        nearest = j;
      }
    }
    if (labels[nearest] != labels[i]) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(n);
}

double T2FeaturesPerPoint(std::size_t n_features, std::size_t n_points) {
  if (n_points == 0) throw InvalidArgument("t2 needs at least one row");
  return static_cast<double>(n_features) / static_cast<double>(n_points);
}

double ImbalanceRatio(std::span<const int> labels) {
  for (const int y : labels) {
    if (y != 0 && y != 1) throw InvalidArgument("labels must be 0 or 1");
  }
  RequireBothClasses(labels, "ir");
  const std::size_t pos = CountPositives(labels);
  const std::size_t neg = labels.size() - pos;
  return static_cast<double>(std::max(pos, neg)) / static_cast<double>(std::min(pos, neg));
}

MetricRegistry MetricRegistry::Default() {
  MetricRegistry registry;
  registry.Register("f1", F1MaxFisher);
  registry.Register("l1", L1LinearError);
  registry.Register("n3", N3NearestNeighborError);
  registry.Register("t2", [](const FeatureMatrix& x, std::span<const int>) {
    return T2FeaturesPerPoint(x.cols, x.rows);
  });
  registry.Register("ir", [](const FeatureMatrix&, std::span<const int> y) {
    return ImbalanceRatio(y);
  });
  return registry;
}

void MetricRegistry::Register(std::string name, MetricFn fn) {
  for (const Metric& metric : metrics_) {
    if (metric.name == name) throw InvalidArgument("metric already registered: " + name);
  }
  metrics_.push_back(Metric{std::move(name), std::move(fn)});
}

std::vector<std::string> MetricRegistry::Names() const {
  std::vector<std::string> names;
  for (const Metric& metric : metrics_) names.push_back(metric.name);
  return names;
}

std::map<Group, ComplexityReport> ComputeReports(const TabularDataset& dataset,
                                                 Awareness awareness,
                                                 const MetricRegistry& registry) {
  const FeatureMatrix view = FeatureView(dataset, awareness);
  struct GroupData {
    Group group;
    FeatureMatrix x;
    std::vector<int> y;
  };
  std::vector<GroupData> groups;
  for (const Group group : kAllGroups) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < dataset.n_rows; ++r) {
      if (dataset.InGroup(r, group)) rows.push_back(r);
    }
    if (rows.empty()) continue;
    GroupData data{group, view.SelectRows(rows), {}};
    for (const std::size_t r : rows) data.y.push_back(dataset.target[r]);
    groups.push_back(std::move(data));
  }

  const auto& metrics = registry.metrics();
  struct Outcome {
    bool ok = false;
    double value = 0.0;
    std::string reason;
  };
  std::vector<Outcome> outcomes(groups.size() * metrics.size());
  ParallelFor(outcomes.size(), [&](std::size_t task) {
    const GroupData& data = groups[task / metrics.size()];
    const Metric& metric = metrics[task % metrics.size()];
    Outcome& out = outcomes[task];
    try {
      out.value = metric.fn(data.x, data.y);
      out.ok = true;
    } catch (const Error& e) {
      out.reason = e.what();
    }
  });

  std::map<Group, ComplexityReport> reports;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    ComplexityReport& report = reports[groups[g].group];
    report.group = groups[g].group;
    report.n_rows = groups[g].x.rows;
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      const Outcome& out = outcomes[g * metrics.size() + k];
      if (out.ok) {
        report.values[metrics[k].name] = out.value;
      } else {
        report.undefined[metrics[k].name] = out.reason;
      }
    }
  }
  return reports;
}

int ConsistencySign(double delta_auc, double delta_cm) {
  if (delta_auc == 0.0 || delta_cm == 0.0) return 0;
  return (delta_auc > 0.0) == (delta_cm > 0.0) ? 1 : -1;
}

ConsistencyMatrix BuildConsistencyMatrix(
    const std::string& dataset_id, const std::vector<eval::DisparityRecord>& disparities,
    const std::map<Group, ComplexityReport>& reports,
    const std::vector<std::string>& metric_names) {
  ConsistencyMatrix matrix;
  for (const eval::DisparityRecord& record : disparities) {
    const GroupPair pair = GroupsOf(record.attribute);
    const auto report_a = reports.find(pair.a);
    const auto report_b = reports.find(pair.b);
    for (const std::string& metric : metric_names) {
      auto omit = [&](std::string reason) {
        matrix.omitted.push_back(
            OmittedCell{dataset_id, metric, record.attribute, std::move(reason)});
      };
      if (record.a.n_runs == 0 || record.b.n_runs == 0) {
        omit("AUC undefined for a group");
        continue;
      }
      if (report_a == reports.end() || report_b == reports.end()) {
        omit("no complexity report for a group");
        continue;
      }
      const auto cm_a = report_a->second.values.find(metric);
      const auto cm_b = report_b->second.values.find(metric);
      if (cm_a == report_a->second.values.end() || cm_b == report_b->second.values.end()) {
        omit("metric undefined for a group");
        continue;
      }
      ConsistencyCell cell;
      cell.dataset = dataset_id;
      cell.metric = metric;
      cell.attribute = record.attribute;
      cell.delta_auc = record.a.mean - record.b.mean;
      cell.delta_cm = cm_b->second - cm_a->second;
      cell.ratio_sign = ConsistencySign(cell.delta_auc, cell.delta_cm);
      matrix.cells.push_back(cell);
    }
  }
  return matrix;
}

Json ToJson(const ComplexityReport& report) {
  Json json;
  json["group"] = std::string(Name(report.group));
  json["n_rows"] = report.n_rows;
  Json values = Json::object();
  for (const auto& [name, value] : report.values) values[name] = EncodeDouble(value);
  json["values"] = std::move(values);
  Json undefined = Json::object();
  for (const auto& [name, reason] : report.undefined) undefined[name] = reason;
  json["undefined"] = std::move(undefined);
  return json;
}

Json ToJson(const ConsistencyMatrix& matrix) {
  Json cells = Json::array();
  for (const ConsistencyCell& c : matrix.cells) {
    cells.push_back({{"dataset", c.dataset},
                     {"metric", c.metric},
                     {"attribute", std::string(Name(c.attribute))},
                     {"delta_auc", c.delta_auc},
                     {"delta_cm", c.delta_cm},
                     {"ratio_sign", c.ratio_sign}});
  }
  Json omitted = Json::array();
  for (const OmittedCell& c : matrix.omitted) {
    omitted.push_back({{"dataset", c.dataset},
                       {"metric", c.metric},
                       {"attribute", std::string(Name(c.attribute))},
                       {"reason", c.reason}});
  }
  return Json{{"cells", std::move(cells)}, {"omitted", std::move(omitted)}};
}

void WriteHeatmapHeader(std::ostream& out, const std::vector<std::string>& metric_names) {
  std::vector<std::string> header = {"dataset", "attribute"};
  header.insert(header.end(), metric_names.begin(), metric_names.end());
  csv::WriteRow(out, header);
}

void WriteHeatmapRows(std::ostream& out, const ConsistencyMatrix& matrix,
                      const std::vector<std::string>& metric_names) {
  std::vector<std::pair<std::string, Attribute>> keys;
  for (const ConsistencyCell& c : matrix.cells) keys.emplace_back(c.dataset, c.attribute);
  for (const OmittedCell& c : matrix.omitted) keys.emplace_back(c.dataset, c.attribute);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  for (const auto& [dataset, attribute] : keys) {
    std::vector<std::string> row = {dataset, std::string(Name(attribute))};
    for (const std::string& metric : metric_names) {
      std::string cell;
      for (const ConsistencyCell& c : matrix.cells) {
        if (c.dataset == dataset && c.attribute == attribute && c.metric == metric) {
          cell = c.ratio_sign > 0 ? "+1" : std::to_string(c.ratio_sign);
        }
      }
      row.push_back(cell);
    }
    csv::WriteRow(out, row);
  }
}

}  // namespace equiscope::complexity
