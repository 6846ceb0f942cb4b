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

#include "equiscope/arbitrariness.h"

#include <algorithm>

#include "equiscope/boosted_trees.h"
#include "equiscope/csv.h"
#include "equiscope/errors.h"

namespace equiscope::arbitrariness {

std::size_t PredictionMatrix::UntestedCount() const {
  std::size_t count = 0;
  for (std::size_t r = 0; r < rows(); ++r) {
    if (!Tested(r)) ++count;
  }
  return count;
}

PredictionMatrix CollectPredictions(const std::vector<eval::ModelRun>& runs,
                                    std::size_t n_rows,
                                    const std::optional<std::string>& algorithm) {
  PredictionMatrix matrix;
  matrix.n1.assign(n_rows, 0);
  matrix.n0.assign(n_rows, 0);
  for (const eval::ModelRun& run : runs) {
    if (algorithm && run.algorithm != *algorithm) continue;
    if (run.scores.size() != run.split.test_rows.size()) {
      throw InvalidArgument("run scores do not align with its test rows");
    }
    ++matrix.n_runs;
    for (std::size_t i = 0; i < run.scores.size(); ++i) {
      const std::size_t row = run.split.test_rows[i];
      if (row >= n_rows) throw InvalidArgument("test row outside the dataset");
      if (trees::PredictLabel(run.scores[i]) == 1) {
        ++matrix.n1[row];
      } else {
        ++matrix.n0[row];
      }
    }
  }
  return matrix;
}

double SelfConsistency(std::uint64_t n1, std::uint64_t n0) {
  const std::uint64_t m = n1 + n0;
  if (m < 2) throw InvalidArgument("self-consistency needs at least two predictions");
  const std::uint64_t agree = (n1 > 0 ? n1 * (n1 - 1) : 0) + (n0 > 0 ? n0 * (n0 - 1) : 0);
  return static_cast<double>(agree) / static_cast<double>(m * (m - 1));
}

SelfConsistencyProfile GroupProfile(const PredictionMatrix& matrix,
                                    const TabularDataset& dataset) {
  if (matrix.rows() != dataset.n_rows) {
    throw InvalidArgument("prediction matrix does not match the dataset");
  }
  SelfConsistencyProfile profile;
  std::vector<std::size_t> order(dataset.n_rows);
  for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dataset.row_ids[a] < dataset.row_ids[b];
  });

  for (const std::size_t r : order) {
    ItemConsistency item;
    item.row = r;
    item.row_id = dataset.row_ids[r];
    item.n1 = matrix.n1[r];
    item.n0 = matrix.n0[r];
    if (item.n1 + item.n0 >= 2) {
      item.sc = SelfConsistency(item.n1, item.n0);
    } else {
      ++profile.n_excluded;
    }
    profile.items.push_back(item);
  }

  for (const Group group : kAllGroups) {
    GroupConsistency g;
    g.group = group;
    for (const ItemConsistency& item : profile.items) {
      if (item.sc && dataset.InGroup(item.row, group)) g.sc.push_back(*item.sc);
    }
    if (g.sc.empty()) continue;
    std::sort(g.sc.begin(), g.sc.end());
    g.cdf_area = stats::CdfArea(g.sc, kCdfLow, kCdfHigh);
    profile.groups[group] = std::move(g);
  }

  std::vector<Attribute> attributes;
  if (dataset.has_sex) attributes.push_back(Attribute::kSex);
  if (dataset.has_age) attributes.push_back(Attribute::kAge);
  for (const Attribute attribute : attributes) {
    const GroupPair pair = GroupsOf(attribute);
    ConsistencyDisparity d;
    d.attribute = attribute;
    const auto a = profile.groups.find(pair.a);
    const auto b = profile.groups.find(pair.b);
    if (a == profile.groups.end() || b == profile.groups.end() || a->second.sc.size() < 2 ||
        b->second.sc.size() < 2) {
      d.insufficient_data = true;
    } else {
      d.ks = stats::KsTwoSample(a->second.sc, b->second.sc);
      if (d.ks.p_value < 0.01 && a->second.cdf_area != b->second.cdf_area) {
        d.more_arbitrary = a->second.cdf_area > b->second.cdf_area ? pair.a : pair.b;
      }
    }
    profile.disparities.push_back(d);
  }
  return profile;
}

Json ToJson(const SelfConsistencyProfile& profile) {
  Json json;
  json["n_items"] = profile.items.size();
  json["n_excluded"] = profile.n_excluded;
  Json groups = Json::object();
  for (const auto& [group, g] : profile.groups) {
    groups[std::string(Name(group))] = {{"n_items", g.sc.size()},
                                        {"cdf_area", g.cdf_area},
                                        {"mean_sc", stats::Mean(g.sc)}};
  }
  json["groups"] = std::move(groups);
  Json disparities = Json::array();
  for (const ConsistencyDisparity& d : profile.disparities) {
    const GroupPair pair = GroupsOf(d.attribute);
    Json entry = {{"attribute", std::string(Name(d.attribute))},
                  {"group_a", std::string(Name(pair.a))},
                  {"group_b", std::string(Name(pair.b))},
                  {"insufficient_data", d.insufficient_data}};
    if (!d.insufficient_data) {
      entry["ks_statistic"] = d.ks.statistic;
      entry["p_value"] = d.ks.p_value;
      entry["stars"] = d.ks.stars;
    }
    entry["more_arbitrary"] =
        d.more_arbitrary ? Json(std::string(Name(*d.more_arbitrary))) : Json(nullptr);
    disparities.push_back(std::move(entry));
  }
  json["disparities"] = std::move(disparities);
  return json;
}

void WriteItemsCsv(std::ostream& out, const SelfConsistencyProfile& profile,
                   const TabularDataset& dataset) {
  csv::WriteRow(out, {"row_id", "n1", "n0", "sc", "groups"});
  for (const ItemConsistency& item : profile.items) {
    std::string groups;
    for (const Group group : kAllGroups) {
      if (group == Group::kOverall || !dataset.InGroup(item.row, group)) continue;
      if (!groups.empty()) groups += ';';
      groups += Name(group);
    }
    csv::WriteRow(out, {std::to_string(item.row_id), std::to_string(item.n1),
                        std::to_string(item.n0), item.sc ? FormatDouble(*item.sc) : "",
                        groups});
  }
}

void WriteCdfHeader(std::ostream& out) {
  csv::WriteRow(out, {"dataset", "group", "sc", "cdf"});
}

void WriteCdfRows(std::ostream& out, const std::string& dataset_id,
                  const SelfConsistencyProfile& profile) {
  for (const auto& [group, g] : profile.groups) {
    const double n = static_cast<double>(g.sc.size());
    for (std::size_t i = 0; i < g.sc.size(); ++i) {
      if (i + 1 < g.sc.size() && g.sc[i + 1] == g.sc[i]) continue;
      csv::WriteRow(out, {dataset_id, std::string(Name(group)), FormatDouble(g.sc[i]),
                          FormatDouble(static_cast<double>(i + 1) / n)});
    }
  }
}

}  // namespace equiscope::arbitrariness
