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

// Self-consistency of a model family: how often two of its models agree on
// an item's predicted label, and how low-agreement items distribute across
// subgroups.

#ifndef EQUISCOPE_ARBITRARINESS_H_
#define EQUISCOPE_ARBITRARINESS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "equiscope/dataset.h"
#include "equiscope/evaluation.h"
#include "equiscope/json_io.h"
#include "equiscope/stats.h"

namespace equiscope::arbitrariness {

// Label counts per dataset row position, from out-of-sample predictions only.
struct PredictionMatrix {
  std::vector<std::uint32_t> n1;
  std::vector<std::uint32_t> n0;
  std::size_t n_runs = 0;

  std::size_t rows() const { return n1.size(); }
  bool Tested(std::size_t row) const { return n1[row] + n0[row] > 0; }
  std::size_t UntestedCount() const;
};

// Thresholds every run's test scores at 0.5 and counts labels per row. When
// `algorithm` is set, only runs of that family member count.
PredictionMatrix CollectPredictions(const std::vector<eval::ModelRun>& runs,
                                    std::size_t n_rows,
                                    const std::optional<std::string>& algorithm = {});

// Unbiased pairwise-agreement estimate (n1(n1-1) + n0(n0-1)) / (m(m-1)).
// Throws InvalidArgument when m = n1 + n0 < 2.
double SelfConsistency(std::uint64_t n1, std::uint64_t n0);

struct ItemConsistency {
  std::size_t row = 0;
  std::uint64_t row_id = 0;
  std::uint32_t n1 = 0;
  std::uint32_t n0 = 0;
  std::optional<double> sc;  // absent when fewer than two predictions
};

struct GroupConsistency {
  Group group = Group::kOverall;
  std::vector<double> sc;  // ascending
  double cdf_area = 0.0;   // over [0.5, 1]; values below 0.5 count as 0.5
};

struct ConsistencyDisparity {
  Attribute attribute = Attribute::kSex;
  bool insufficient_data = false;  // a group has fewer than two SC items
  stats::TestResult ks;            // two-level stars
  // Group with the larger CDF area, set only when the KS test has p < 0.01.
  std::optional<Group> more_arbitrary;
};

struct SelfConsistencyProfile {
  std::vector<ItemConsistency> items;  // sorted by row_id
  std::size_t n_excluded = 0;          // items with fewer than two predictions
  std::map<Group, GroupConsistency> groups;
  std::vector<ConsistencyDisparity> disparities;
};

inline constexpr double kCdfLow = 0.5;
inline constexpr double kCdfHigh = 1.0;

// Per-group SC lists and areas for every non-empty group, and a KS
// comparison for each attribute the dataset carries.
SelfConsistencyProfile GroupProfile(const PredictionMatrix& matrix,
                                    const TabularDataset& dataset);

Json ToJson(const SelfConsistencyProfile& profile);

// row_id,n1,n0,sc,groups (groups joined by ';', sc empty when excluded).
void WriteItemsCsv(std::ostream& out, const SelfConsistencyProfile& profile,
                   const TabularDataset& dataset);

// Empirical CDF steps dataset,group,sc,cdf for plotting.
void WriteCdfHeader(std::ostream& out);
void WriteCdfRows(std::ostream& out, const std::string& dataset_id,
                  const SelfConsistencyProfile& profile);

}  // namespace equiscope::arbitrariness

#endif  // EQUISCOPE_ARBITRARINESS_H_
