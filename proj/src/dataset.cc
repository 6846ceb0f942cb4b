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

#include "equiscope/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "equiscope/csv.h"
#include "equiscope/errors.h"
#include "equiscope/random.h"
#include "equiscope/stats.h"

namespace equiscope {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool IsMissingCell(std::string_view cell, const std::vector<std::string>& codes) {
  if (cell.empty()) return true;
  return std::find(codes.begin(), codes.end(), cell) != codes.end();
}

std::optional<double> ParseNumber(std::string_view cell) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (begin != end && *begin == '+') ++begin;
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::size_t RequireColumn(const csv::Table& table, const std::string& name) {
  const std::size_t index = table.ColumnIndex(name);
  if (index == csv::Table::npos) {
    throw SchemaError("column \"" + name + "\" not found in CSV header");
  }
  return index;
}

const Json& RequireKey(const Json& json, const char* key) {
  if (!json.contains(key)) {
    throw SchemaError(std::string("manifest is missing required key \"") + key + "\"");
  }
  return json.at(key);
}

std::string RequireString(const Json& json, const char* key) {
  const Json& value = RequireKey(json, key);
  if (!value.is_string()) {
    throw SchemaError(std::string("manifest key \"") + key + "\" must be a string");
  }
  return value.get<std::string>();
}

std::vector<std::string> StringList(const Json& value, const char* key) {
  if (!value.is_array()) {
    throw SchemaError(std::string("manifest key \"") + key + "\" must be a list");
  }
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) {
      throw SchemaError(std::string("manifest key \"") + key +
                        "\" must contain strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

void RejectUnknownKeys(const Json& json, std::initializer_list<std::string_view> known,
                       std::string_view where) {
  for (auto it = json.begin(); it != json.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw SchemaError("unknown key \"" + it.key() + "\" in " + std::string(where));
    }
  }
}

std::int64_t RequireInteger(const Json& json, const char* key) {
  const Json& value = RequireKey(json, key);
  if (!value.is_number_integer()) {
    throw SchemaError(std::string("key \"") + key + "\" must be an integer");
  }
  return value.get<std::int64_t>();
}

}  // namespace

GroupPair GroupsOf(Attribute attribute) {
  return attribute == Attribute::kSex ? GroupPair{Group::kFemale, Group::kMale}
                                      : GroupPair{Group::kOld, Group::kYoung};
}

std::string_view Name(Group group) {
  switch (group) {
    case Group::kOverall: return "overall";
    case Group::kFemale: return "female";
    case Group::kMale: return "male";
    case Group::kOld: return "old";
    case Group::kYoung: return "young";
  }
  return "unknown";
}

std::string_view Name(Attribute attribute) {
  return attribute == Attribute::kSex ? "sex" : "age";
}

std::string_view Name(Awareness awareness) {
  return awareness == Awareness::kAware ? "aware" : "unaware";
}

Group ParseGroup(std::string_view name) {
  for (const Group g : kAllGroups) {
    if (Name(g) == name) return g;
  }
  throw InvalidArgument("unknown group \"" + std::string(name) + "\"");
}

Attribute ParseAttribute(std::string_view name) {
  if (name == "sex") return Attribute::kSex;
  if (name == "age") return Attribute::kAge;
  throw InvalidArgument("attribute must be sex or age, got \"" + std::string(name) + "\"");
}

Awareness ParseAwareness(std::string_view name) {
  if (name == "aware") return Awareness::kAware;
  if (name == "unaware") return Awareness::kUnaware;
  throw InvalidArgument("awareness must be aware or unaware, got \"" +
                        std::string(name) + "\"");
}

void DatasetManifest::Validate() const {
  if (target_column.empty()) throw SchemaError("target_column is empty");
  if (feature_columns.empty()) throw SchemaError("feature_columns is empty");
  std::set<std::string> seen;
  for (const auto& column : feature_columns) {
    if (!seen.insert(column).second) {
      throw SchemaError("feature column \"" + column + "\" listed twice");
    }
  }
  if (seen.contains(target_column)) {
    throw SchemaError("target column \"" + target_column + "\" is listed as a feature");
  }
  auto check_protected = [&](const std::string& column) {
    if (seen.contains(column)) {
      throw SchemaError("protected column \"" + column +
                        "\" must not be listed as a feature; awareness views add it");
    }
    if (column == target_column) {
      throw SchemaError("protected column \"" + column + "\" is the target");
    }
  };
  if (sex_column) check_protected(sex_column->name);
  if (age_column) check_protected(*age_column);
  if (sex_column && age_column && sex_column->name == *age_column) {
    throw SchemaError("sex and age columns are the same");
  }
  if (subset_rule) {
    if (subset_rule->multiplier < 1) throw SchemaError("subset_rule.multiplier must be >= 1");
    if (subset_rule->subset_count < 1) {
      throw SchemaError("subset_rule.subset_count must be >= 1");
    }
  }
}

DatasetManifest DatasetManifest::FromJson(const Json& json,
                                          const std::filesystem::path& base_dir) {
  if (!json.is_object()) throw SchemaError("manifest must be a JSON object");
  RejectUnknownKeys(json,
                    {"csv_path", "target_column", "positive_label", "feature_columns",
                     "sex_column", "age_column", "missing_codes", "subset_rule"},
                    "manifest");
  DatasetManifest m;
  const std::filesystem::path csv = RequireString(json, "csv_path");
  m.csv_path = csv.is_absolute() ? csv : base_dir / csv;
  m.target_column = RequireString(json, "target_column");
  m.positive_label = RequireString(json, "positive_label");
  m.feature_columns = StringList(RequireKey(json, "feature_columns"), "feature_columns");
  if (json.contains("sex_column")) {
    const Json& sex = json.at("sex_column");
    if (!sex.is_object()) throw SchemaError("sex_column must be an object");
    RejectUnknownKeys(sex, {"name", "female", "male"}, "sex_column");
    m.sex_column = SexColumn{RequireString(sex, "name"), RequireString(sex, "female"),
                             RequireString(sex, "male")};
  }
  if (json.contains("age_column")) m.age_column = RequireString(json, "age_column");
  if (json.contains("missing_codes")) {
    m.missing_codes = StringList(json.at("missing_codes"), "missing_codes");
  }
  if (json.contains("subset_rule")) {
    const Json& rule = json.at("subset_rule");
    if (!rule.is_object()) throw SchemaError("subset_rule must be an object");
    RejectUnknownKeys(rule, {"multiplier", "seed", "subset_count"}, "subset_rule");
    SubsetRule r;
    if (rule.contains("multiplier")) r.multiplier = static_cast<int>(RequireInteger(rule, "multiplier"));
    r.seed = static_cast<std::uint64_t>(RequireInteger(rule, "seed"));
    r.subset_count = static_cast<int>(RequireInteger(rule, "subset_count"));
    m.subset_rule = r;
  }
  m.Validate();
  return m;
}

DatasetManifest DatasetManifest::FromFile(const std::filesystem::path& path) {
  DatasetManifest m = FromJson(ReadJsonFile(path), path.parent_path());
  m.dataset_id = path.stem().string();
  return m;
}

Json DatasetManifest::ToJson() const {
  Json json;
  json["csv_path"] = csv_path.string();
  json["target_column"] = target_column;
  json["positive_label"] = positive_label;
  json["feature_columns"] = feature_columns;
  if (sex_column) {
    json["sex_column"] = {{"name", sex_column->name},
                          {"female", sex_column->female},
                          {"male", sex_column->male}};
  }
  if (age_column) json["age_column"] = *age_column;
  json["missing_codes"] = missing_codes;
  if (subset_rule) {
    json["subset_rule"] = {{"multiplier", subset_rule->multiplier},
                           {"seed", subset_rule->seed},
                           {"subset_count", subset_rule->subset_count}};
  }
  return json;
}

bool TabularDataset::InGroup(std::size_t row, Group group) const {
  switch (group) {
    case Group::kOverall: return true;
    case Group::kFemale: return sex_group[row] == SexGroup::kFemale;
    case Group::kMale: return sex_group[row] == SexGroup::kMale;
    case Group::kOld: return age_group[row] == AgeGroup::kOld;
    case Group::kYoung: return age_group[row] == AgeGroup::kYoung;
  }
  return false;
}

std::size_t TabularDataset::GroupSize(Group group) const {
  std::size_t count = 0;
  for (std::size_t r = 0; r < n_rows; ++r) count += InGroup(r, group) ? 1 : 0;
  return count;
}

TabularDataset TabularDataset::SelectRows(std::span<const std::size_t> rows) const {
  TabularDataset out;
  out.dataset_id = dataset_id;
  out.feature_names = feature_names;
  out.n_rows = rows.size();
  out.n_features = n_features;
  out.has_sex = has_sex;
  out.has_age = has_age;
  out.features.reserve(rows.size() * n_features);
  out.missing.reserve(rows.size() * n_features);
  for (const std::size_t r : rows) {
    if (r >= n_rows) throw InvalidArgument("row index out of range");
    out.features.insert(out.features.end(), features.begin() + r * n_features,
                        features.begin() + (r + 1) * n_features);
    out.missing.insert(out.missing.end(), missing.begin() + r * n_features,
                       missing.begin() + (r + 1) * n_features);
    out.target.push_back(target[r]);
    out.sex_group.push_back(sex_group[r]);
    out.age.push_back(age[r]);
    out.age_group.push_back(age_group[r]);
    out.row_ids.push_back(row_ids[r]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::SelectRows(std::span<const std::size_t> row_indices) const {
  FeatureMatrix out;
  out.rows = row_indices.size();
  out.cols = cols;
  out.names = names;
  out.values.reserve(out.rows * cols);
  out.missing.reserve(out.rows * cols);
  for (const std::size_t r : row_indices) {
    out.values.insert(out.values.end(), values.begin() + r * cols,
                      values.begin() + (r + 1) * cols);
    out.missing.insert(out.missing.end(), missing.begin() + r * cols,
                       missing.begin() + (r + 1) * cols);
  }
  return out;
}

TabularDataset LoadDataset(const DatasetManifest& manifest) {
  manifest.Validate();
  const csv::Table table = csv::ReadFile(manifest.csv_path);

  const std::size_t target_index = RequireColumn(table, manifest.target_column);
  std::vector<std::size_t> feature_index;
  for (const auto& name : manifest.feature_columns) {
    feature_index.push_back(RequireColumn(table, name));
  }
  std::optional<std::size_t> sex_index;
  if (manifest.sex_column) sex_index = RequireColumn(table, manifest.sex_column->name);
  std::optional<std::size_t> age_index;
  if (manifest.age_column) age_index = RequireColumn(table, *manifest.age_column);

  TabularDataset ds;
  ds.dataset_id = manifest.dataset_id;
  ds.feature_names = manifest.feature_columns;
  ds.n_features = feature_index.size();
  ds.has_sex = sex_index.has_value();
  ds.has_age = age_index.has_value();

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string_view target_cell = Trim(row[target_index]);
    if (IsMissingCell(target_cell, manifest.missing_codes)) {
      ++ds.dropped_missing_target;
      continue;
    }
    for (std::size_t j = 0; j < feature_index.size(); ++j) {
      const std::string_view cell = Trim(row[feature_index[j]]);
      if (IsMissingCell(cell, manifest.missing_codes)) {
        ds.features.push_back(kNaN);
        ds.missing.push_back(1);
        continue;
      }
      const auto value = ParseNumber(cell);
      if (!value) {
        throw ParseError(r + 1, manifest.feature_columns[j],
                         "row " + std::to_string(r + 1) + ", column \"" +
                             manifest.feature_columns[j] + "\": cannot parse \"" +
                             std::string(cell) + "\" as a number");
      }
      ds.features.push_back(*value);
      ds.missing.push_back(0);
    }
    ds.target.push_back(target_cell == manifest.positive_label ? 1 : 0);

    SexGroup sex = SexGroup::kAbsent;
    if (sex_index) {
      const std::string_view cell = Trim(row[*sex_index]);
      if (cell == manifest.sex_column->female) {
        sex = SexGroup::kFemale;
      } else if (cell == manifest.sex_column->male) {
        sex = SexGroup::kMale;
      }
    }
    ds.sex_group.push_back(sex);

    double age = kNaN;
    if (age_index) {
      const std::string_view cell = Trim(row[*age_index]);
      if (!IsMissingCell(cell, manifest.missing_codes)) {
        const auto value = ParseNumber(cell);
        if (!value) {
          throw ParseError(r + 1, *manifest.age_column,
                           "row " + std::to_string(r + 1) + ", column \"" +
                               *manifest.age_column + "\": cannot parse \"" +
                               std::string(cell) + "\" as a number");
        }
        age = *value;
      }
    }
    ds.age.push_back(age);
    ds.age_group.push_back(std::isnan(age) ? AgeGroup::kAbsent : AgeGroup::kUnassigned);
    ds.row_ids.push_back(r);
  }
  ds.n_rows = ds.target.size();
  return ds;
}

AgeBinarization BinarizeAge(const TabularDataset& dataset) {
  if (!dataset.has_age) throw InvalidArgument("dataset has no age column");
  AgeBinarization result{dataset, std::nullopt, {}};
  std::vector<double> ages;
  for (const double a : dataset.age) {
    if (!std::isnan(a)) ages.push_back(a);
  }
  TabularDataset& ds = result.dataset;
  if (ages.empty()) {
    result.warnings.push_back("no non-missing ages; age groups left unassigned");
    return result;
  }
  AgeQuintileBounds bounds{stats::Quantile(ages, 0.2), stats::Quantile(ages, 0.4),
                           stats::Quantile(ages, 0.6), stats::Quantile(ages, 0.8)};
  result.bounds = bounds;
  const auto [min_it, max_it] = std::minmax_element(ages.begin(), ages.end());
  const bool degenerate = *min_it == *max_it;
  if (degenerate) {
    result.warnings.push_back("all ages are identical; every row left unassigned");
  }
  for (std::size_t r = 0; r < ds.n_rows; ++r) {
    const double a = ds.age[r];
    if (std::isnan(a)) {
      ds.age_group[r] = AgeGroup::kAbsent;
    } else if (degenerate) {
      ds.age_group[r] = AgeGroup::kUnassigned;
    } else if (a <= bounds.q40) {
      ds.age_group[r] = AgeGroup::kYoung;
    } else if (a > bounds.q60) {
      ds.age_group[r] = AgeGroup::kOld;
    } else {
      ds.age_group[r] = AgeGroup::kUnassigned;
    }
  }
  return result;
}

std::vector<TabularDataset> DrawSubsets(const TabularDataset& dataset,
                                        const SubsetRule& rule) {
  if (rule.multiplier < 1 || rule.subset_count < 1) {
    throw InvalidArgument("subset multiplier and count must be positive");
  }
  const std::size_t size = static_cast<std::size_t>(rule.multiplier) * dataset.n_features;
  const std::size_t total = size * static_cast<std::size_t>(rule.subset_count);
  if (size == 0 || total > dataset.n_rows) {
    throw InvalidArgument("subsets need " + std::to_string(total) + " rows, dataset has " +
                          std::to_string(dataset.n_rows));
  }
  Rng rng(rule.seed);
  const std::vector<std::size_t> perm = Permutation(dataset.n_rows, rng);
  std::vector<TabularDataset> subsets;
  for (int k = 0; k < rule.subset_count; ++k) {
    std::vector<std::size_t> rows(perm.begin() + k * size, perm.begin() + (k + 1) * size);
    std::sort(rows.begin(), rows.end());
    subsets.push_back(dataset.SelectRows(rows));
    subsets.back().dataset_id = dataset.dataset_id + "_s" + std::to_string(k);
  }
  return subsets;
}

FeatureMatrix FeatureView(const TabularDataset& dataset, Awareness awareness) {
  const bool add_sex = awareness == Awareness::kAware && dataset.has_sex;
  const bool add_age = awareness == Awareness::kAware && dataset.has_age;
  FeatureMatrix m;
  m.rows = dataset.n_rows;
  m.cols = dataset.n_features + (add_sex ? 1 : 0) + (add_age ? 1 : 0);
  m.names = dataset.feature_names;
  if (add_sex) m.names.push_back("sex");
  if (add_age) m.names.push_back("age");
  m.values.reserve(m.rows * m.cols);
  m.missing.reserve(m.rows * m.cols);
  for (std::size_t r = 0; r < dataset.n_rows; ++r) {
    for (std::size_t j = 0; j < dataset.n_features; ++j) {
      m.values.push_back(dataset.Feature(r, j));
      m.missing.push_back(dataset.missing[r * dataset.n_features + j]);
    }
    if (add_sex) {
      const SexGroup s = dataset.sex_group[r];
      m.values.push_back(s == SexGroup::kFemale ? 0.0 : s == SexGroup::kMale ? 1.0 : kNaN);
      m.missing.push_back(s == SexGroup::kAbsent ? 1 : 0);
    }
    if (add_age) {
      m.values.push_back(dataset.age[r]);
      m.missing.push_back(std::isnan(dataset.age[r]) ? 1 : 0);
    }
  }
  return m;
}

void WriteDatasetCsv(const TabularDataset& dataset, const DatasetManifest& manifest,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  std::vector<std::string> header = manifest.feature_columns;
  header.push_back(manifest.target_column);
  if (manifest.sex_column) header.push_back(manifest.sex_column->name);
  if (manifest.age_column) header.push_back(*manifest.age_column);
  csv::WriteRow(out, header);

  const std::string negative = manifest.positive_label == "0" ? "1" : "0";
  for (std::size_t r = 0; r < dataset.n_rows; ++r) {
    std::vector<std::string> fields;
    for (std::size_t j = 0; j < dataset.n_features; ++j) {
      fields.push_back(dataset.Missing(r, j) ? std::string() : FormatDouble(dataset.Feature(r, j)));
    }
    fields.push_back(dataset.target[r] == 1 ? manifest.positive_label : negative);
    if (manifest.sex_column) {
      const SexGroup s = dataset.sex_group[r];
      fields.push_back(s == SexGroup::kFemale ? manifest.sex_column->female
                       : s == SexGroup::kMale ? manifest.sex_column->male
                                              : std::string());
    }
    if (manifest.age_column) {
      fields.push_back(std::isnan(dataset.age[r]) ? std::string() : FormatDouble(dataset.age[r]));
    }
    csv::WriteRow(out, fields);
  }
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<TabularDataset> PrepareDatasets(const DatasetManifest& manifest,
                                            std::vector<std::string>* warnings) {
  TabularDataset ds = LoadDataset(manifest);
  if (ds.has_age) {
    AgeBinarization binarized = BinarizeAge(ds);
    if (warnings) {
      warnings->insert(warnings->end(), binarized.warnings.begin(),
                       binarized.warnings.end());
    }
    ds = std::move(binarized.dataset);
  }
  if (!manifest.subset_rule) return {std::move(ds)};
  return DrawSubsets(ds, *manifest.subset_rule);
}

}  // namespace equiscope
