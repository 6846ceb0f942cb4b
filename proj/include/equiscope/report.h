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

// End-to-end audit: configuration, the staged pipeline and the renderers
// that turn its results into JSON, markdown and CSV.

#ifndef EQUISCOPE_REPORT_H_
#define EQUISCOPE_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "equiscope/arbitrariness.h"
#include "equiscope/boosted_trees.h"
#include "equiscope/complexity.h"
#include "equiscope/dataset.h"
#include "equiscope/evaluation.h"
#include "equiscope/json_io.h"
#include "equiscope/learning_curves.h"

namespace equiscope::report {

enum class AwarenessMode { kAware, kUnaware, kBoth };
std::string_view Name(AwarenessMode mode);
AwarenessMode ParseAwarenessMode(std::string_view name);
std::vector<Awareness> Expand(AwarenessMode mode);

struct AuditConfig {
  std::filesystem::path manifest;
  std::uint64_t seed = 0;
  AwarenessMode awareness = AwarenessMode::kBoth;
  std::vector<trees::Preset> presets = {trees::Preset::kA, trees::Preset::kB,
                                        trees::Preset::kC};
  int folds = 3;
  int n_random = 19;
  std::vector<double> curve_sizes = curves::DefaultSizeGrid();
  int curve_repeats = 5;
  eval::SignificanceTest test = eval::SignificanceTest::kWelch;
  // Restricts the self-consistency family to one preset.
  std::optional<trees::Preset> sc_preset;
  std::filesystem::path out = "equiscope-out";

  // Throws InvalidArgument on out-of-range values.
  void Validate() const;
  // Unknown keys are rejected with SchemaError; relative paths resolve
  // against base_dir.
  static AuditConfig FromJson(const Json& json, const std::filesystem::path& base_dir);
  static AuditConfig FromFile(const std::filesystem::path& path);
  Json ToJson() const;
};

struct Stages {
  bool evaluation = true;  // required by complexity and arbitrariness
  bool curves = true;
  bool complexity = true;
  bool arbitrariness = true;
};

struct NAddEntry {
  Attribute attribute = Attribute::kSex;
  std::optional<curves::ExtrapolationResult> result;
  std::string reason;  // why result is absent
};

// Everything computed for one dataset under one awareness mode.
struct DatasetAudit {
  TabularDataset dataset;
  Awareness awareness = Awareness::kAware;
  std::vector<Attribute> attributes;
  std::vector<eval::ModelRun> runs;
  std::map<Group, eval::GroupAucStats> auc;
  std::vector<eval::DisparityRecord> disparities;
  curves::CurveSet curves;
  std::vector<NAddEntry> n_add;
  std::map<Group, complexity::ComplexityReport> complexity;
  complexity::ConsistencyMatrix consistency;
  arbitrariness::PredictionMatrix predictions;
  arbitrariness::SelfConsistencyProfile sc;
  std::map<std::string, double> timings_ms;
};

// Seed of one pipeline stage, derived from the master seed.
std::uint64_t StageSeed(std::uint64_t master_seed, std::string_view stage);

DatasetAudit AuditDataset(const TabularDataset& dataset, Awareness awareness,
                          const AuditConfig& config, const Stages& stages = {});

struct RenderedTable {
  std::string markdown;
  Json json;
};

// "mean ± std" with two decimals.
std::string FormatAuc(double mean, double std);
// Nearest whole percent, "∞" when unbounded.
std::string FormatPercent(const curves::ExtrapolationResult& result);

RenderedTable RenderAucTable(const std::vector<eval::DisparityRecord>& disparities);
RenderedTable RenderNAddTable(const std::vector<NAddEntry>& entries);
RenderedTable RenderScTable(const arbitrariness::SelfConsistencyProfile& profile);
RenderedTable RenderConsistencyTable(const complexity::ConsistencyMatrix& matrix,
                                     const std::vector<std::string>& metric_names);

Json DatasetSummary(const TabularDataset& dataset);
Json ToJson(const DatasetAudit& audit, const std::vector<std::string>& metric_names);
Json Provenance(const AuditConfig& config);

// Runs the whole pipeline and writes report.json, report.md, heatmap.csv,
// curves.csv, sc_cdf.csv and timings.json under config.out (one subtree per
// awareness mode when both are requested). Files are written to a staging
// directory first; on failure nothing is left behind.
void RenderFull(const AuditConfig& config);

// Writes `files` (relative name to contents) into `out` atomically with
// respect to failures: either all of them land or none do.
void CommitFiles(const std::filesystem::path& out,
                 const std::map<std::string, std::string>& files);

}  // namespace equiscope::report

#endif  // EQUISCOPE_REPORT_H_
