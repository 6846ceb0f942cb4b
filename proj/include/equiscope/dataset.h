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

// Dataset ingestion: manifests, CSV loading, protected-attribute grouping,
// fixed-size subsets and aware/unaware feature views.

#ifndef EQUISCOPE_DATASET_H_
#define EQUISCOPE_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "equiscope/json_io.h"

namespace equiscope {

enum class SexGroup : std::uint8_t { kFemale, kMale, kAbsent };
enum class AgeGroup : std::uint8_t { kYoung, kOld, kUnassigned, kAbsent };
enum class Awareness { kAware, kUnaware };

// Subgroups that AUC, complexity and self-consistency are reported for.
enum class Group { kOverall, kFemale, kMale, kOld, kYoung };
inline constexpr Group kAllGroups[] = {Group::kOverall, Group::kFemale,
                                       Group::kMale, Group::kOld, Group::kYoung};

enum class Attribute { kSex, kAge };

// The ordered pair compared for an attribute: (A, B) = (female, male) for
// sex and (old, young) for age.
struct GroupPair {
  Group a;
  Group b;
};
GroupPair GroupsOf(Attribute attribute);

std::string_view Name(Group group);
std::string_view Name(Attribute attribute);
std::string_view Name(Awareness awareness);
Group ParseGroup(std::string_view name);
Attribute ParseAttribute(std::string_view name);
Awareness ParseAwareness(std::string_view name);

struct SexColumn {
  std::string name;
  std::string female;  // cell value encoding female
  std::string male;    // cell value encoding male
};

struct SubsetRule {
  int multiplier = 100;
  std::uint64_t seed = 0;
  int subset_count = 1;
};

struct DatasetManifest {
  // Not a manifest key: taken from the manifest file stem.
  std::string dataset_id = "dataset";
  std::filesystem::path csv_path;
  std::string target_column;
  std::string positive_label;
  std::vector<std::string> feature_columns;
  std::optional<SexColumn> sex_column;
  std::optional<std::string> age_column;
  std::vector<std::string> missing_codes;
  std::optional<SubsetRule> subset_rule;

  // Throws SchemaError on violated invariants (target listed as a feature,
  // duplicated columns, protected columns listed as features).
  void Validate() const;

  // Unknown keys are rejected. Relative csv_path values resolve against
  // base_dir.
  static DatasetManifest FromJson(const Json& json,
                                  const std::filesystem::path& base_dir);
  static DatasetManifest FromFile(const std::filesystem::path& path);
  Json ToJson() const;
};

struct AgeQuintileBounds {
  double q20 = 0.0;
  double q40 = 0.0;
  double q60 = 0.0;
  double q80 = 0.0;
};

// Immutable after construction; safe to share across threads.
struct TabularDataset {
  std::string dataset_id;
  std::vector<std::string> feature_names;
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<double> features;        // row-major, NaN where missing
  std::vector<std::uint8_t> missing;   // row-major, 1 where missing
  std::vector<int> target;             // 0 or 1
  std::vector<SexGroup> sex_group;
  std::vector<double> age;             // raw years, NaN when missing/absent
  std::vector<AgeGroup> age_group;
  std::vector<std::uint64_t> row_ids;  // 0-based data-row index in the file
  bool has_sex = false;
  bool has_age = false;
  std::size_t dropped_missing_target = 0;

  double Feature(std::size_t row, std::size_t col) const {
    return features[row * n_features + col];
  }
  bool Missing(std::size_t row, std::size_t col) const {
    return missing[row * n_features + col] != 0;
  }
  bool InGroup(std::size_t row, Group group) const;
  std::size_t GroupSize(Group group) const;

  // Rows in the given order; row_ids are carried over.
  TabularDataset SelectRows(std::span<const std::size_t> rows) const;
};

// Dense feature matrix handed to learners and complexity metrics.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;         // row-major, NaN where missing
  std::vector<std::uint8_t> missing;  // row-major
  std::vector<std::string> names;

  double At(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  bool IsMissing(std::size_t r, std::size_t c) const {
    return missing[r * cols + c] != 0;
  }
  FeatureMatrix SelectRows(std::span<const std::size_t> row_indices) const;
};

// Reads the manifest's CSV. Missing codes and empty cells become masked
// entries; rows whose target is missing are dropped and counted. Throws
// SchemaError naming an absent column, ParseError for a non-numeric cell.
TabularDataset LoadDataset(const DatasetManifest& manifest);

struct AgeBinarization {
  TabularDataset dataset;
  std::optional<AgeQuintileBounds> bounds;
  std::vector<std::string> warnings;
};

// young: age <= q40; old: age > q60; otherwise unassigned. Quintile cut
// points are linear-interpolation quantiles of the non-missing ages. When all
// ages are identical every row is unassigned and a warning is emitted.
AgeBinarization BinarizeAge(const TabularDataset& dataset);

// subset_count disjoint uniform samples without replacement, each of
// multiplier * n_features rows, rows kept in file order. Throws
// InvalidArgument when the requested total exceeds the row count.
std::vector<TabularDataset> DrawSubsets(const TabularDataset& dataset,
                                        const SubsetRule& rule);

// aware: features, then sex (female 0 / male 1) and raw age when present.
// unaware: features only.
FeatureMatrix FeatureView(const TabularDataset& dataset, Awareness awareness);

// Writes the dataset back as CSV using the manifest's column names, so that
// loading the result with the same manifest reproduces the dataset.
void WriteDatasetCsv(const TabularDataset& dataset,
                     const DatasetManifest& manifest,
                     const std::filesystem::path& path);

// Load, binarize age when present, then draw subsets when the manifest has a
// subset rule. Subset datasets get ids "<id>_s<k>".
std::vector<TabularDataset> PrepareDatasets(const DatasetManifest& manifest,
                                            std::vector<std::string>* warnings);

}  // namespace equiscope

#endif  // EQUISCOPE_DATASET_H_
