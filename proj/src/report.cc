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

#include "equiscope/report.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "equiscope/csv.h"
#include "equiscope/errors.h"
#include "equiscope/random.h"

namespace equiscope::report {
namespace {

namespace fs = std::filesystem;

std::string Fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

std::string PValue(double p) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3g", p);
  return buffer;
}

// Stars are literal asterisks, so escape them inside markdown.
std::string EscapeStars(const std::string& stars) {
  std::string out;
  for (const char c : stars) {
    if (c == '*') out += '\\';
    out += c;
  }
  return out;
}

std::string Bold(const std::string& text) { return "**" + text + "**"; }

std::string Row(const std::vector<std::string>& cells) {
  std::string line = "|";
  for (const std::string& cell : cells) line += " " + cell + " |";
  return line + "\n";
}

std::string Header(const std::vector<std::string>& cells) {
  std::string line = Row(cells) + "|";
  for (std::size_t i = 0; i < cells.size(); ++i) line += " --- |";
  return line + "\n";
}

std::vector<Attribute> AttributesOf(const TabularDataset& dataset) {
  std::vector<Attribute> attributes;
  if (dataset.has_sex) attributes.push_back(Attribute::kSex);
  if (dataset.has_age) attributes.push_back(Attribute::kAge);
  return attributes;
}

class StageTimer {
 public:
  explicit StageTimer(double& sink)
      : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    sink_ = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                      start_)
                .count();
  }

 private:
  double& sink_;
  std::chrono::steady_clock::time_point start_;
};

template <typename T>
T Get(const Json& json, const char* key) {
  try {
    return json.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("config key \"") + key + "\": " + e.what());
  }
}

}  // namespace

std::string_view Name(AwarenessMode mode) {
  switch (mode) {
    case AwarenessMode::kAware: return "aware";
    case AwarenessMode::kUnaware: return "unaware";
    case AwarenessMode::kBoth: return "both";
  }
  return "both";
}

AwarenessMode ParseAwarenessMode(std::string_view name) {
  if (name == "aware") return AwarenessMode::kAware;
  if (name == "unaware") return AwarenessMode::kUnaware;
  if (name == "both") return AwarenessMode::kBoth;
  throw InvalidArgument("awareness must be aware, unaware or both");
}

std::vector<Awareness> Expand(AwarenessMode mode) {
  switch (mode) {
    case AwarenessMode::kAware: return {Awareness::kAware};
    case AwarenessMode::kUnaware: return {Awareness::kUnaware};
    case AwarenessMode::kBoth: return {Awareness::kAware, Awareness::kUnaware};
  }
  return {};
}

void AuditConfig::Validate() const {
  if (folds < 2) throw InvalidArgument("folds must be >= 2");
  if (n_random < 0) throw InvalidArgument("n_random must be >= 0");
  if (curve_repeats < 1) throw InvalidArgument("curve_repeats must be >= 1");
  if (presets.empty()) throw InvalidArgument("at least one preset is required");
  std::set<trees::Preset> unique(presets.begin(), presets.end());
  if (unique.size() != presets.size()) throw InvalidArgument("duplicate preset");
  if (curve_sizes.empty()) throw InvalidArgument("curve_sizes is empty");
  for (std::size_t i = 0; i < curve_sizes.size(); ++i) {
    if (!(curve_sizes[i] > 0.0 && curve_sizes[i] <= 1.0) ||
        (i > 0 && !(curve_sizes[i] > curve_sizes[i - 1]))) {
      throw InvalidArgument("curve_sizes must ascend strictly within (0, 1]");
    }
  }
  if (sc_preset && !unique.count(*sc_preset)) {
    throw InvalidArgument("sc_preset is not among the configured presets");
  }
}

AuditConfig AuditConfig::FromJson(const Json& json, const fs::path& base_dir) {
  if (!json.is_object()) throw SchemaError("config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "manifest", "seed",          "awareness",         "presets",   "folds",
      "n_random", "curve_sizes",   "curve_repeats",     "sc_preset", "out",
      "significance_test"};
  for (const auto& [key, value] : json.items()) {
    if (!kKeys.count(key)) throw SchemaError("unknown config key \"" + key + "\"");
  }
  AuditConfig config;
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  if (json.contains("manifest")) config.manifest = resolve(Get<std::string>(json, "manifest"));
  if (json.contains("seed")) config.seed = Get<std::uint64_t>(json, "seed");
  try {
    if (json.contains("awareness")) {
      config.awareness = ParseAwarenessMode(Get<std::string>(json, "awareness"));
    }
    if (json.contains("presets")) {
      config.presets.clear();
      for (const auto& p : Get<std::vector<std::string>>(json, "presets")) {
        config.presets.push_back(trees::ParsePreset(p));
      }
    }
    if (json.contains("significance_test")) {
      config.test = eval::ParseSignificanceTest(Get<std::string>(json, "significance_test"));
    }
    if (json.contains("sc_preset") && !json.at("sc_preset").is_null()) {
      config.sc_preset = trees::ParsePreset(Get<std::string>(json, "sc_preset"));
    }
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
  if (json.contains("folds")) config.folds = Get<int>(json, "folds");
  if (json.contains("n_random")) config.n_random = Get<int>(json, "n_random");
  if (json.contains("curve_sizes")) {
    config.curve_sizes = Get<std::vector<double>>(json, "curve_sizes");
  }
  if (json.contains("curve_repeats")) config.curve_repeats = Get<int>(json, "curve_repeats");
  if (json.contains("out")) config.out = resolve(Get<std::string>(json, "out"));
  try {
    config.Validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
  return config;
}

AuditConfig AuditConfig::FromFile(const fs::path& path) {
  return FromJson(ReadJsonFile(path), path.parent_path());
}

Json AuditConfig::ToJson() const {
  Json json;
  json["manifest"] = manifest.string();
  json["seed"] = seed;
  json["awareness"] = std::string(Name(awareness));
  Json names = Json::array();
  for (const trees::Preset p : presets) names.push_back(std::string(trees::Name(p)));
  json["presets"] = names;
  json["folds"] = folds;
  json["n_random"] = n_random;
  json["curve_sizes"] = curve_sizes;
  json["curve_repeats"] = curve_repeats;
  json["significance_test"] = std::string(eval::Name(test));
  json["sc_preset"] = sc_preset ? Json(std::string(trees::Name(*sc_preset))) : Json(nullptr);
  return json;
}

std::uint64_t StageSeed(std::uint64_t master_seed, std::string_view stage) {
  return DeriveSeed(master_seed, {TagOf("stage"), TagOf(stage)});
}

DatasetAudit AuditDataset(const TabularDataset& dataset, Awareness awareness,
                          const AuditConfig& config, const Stages& stages) {
  config.Validate();
  if (!stages.evaluation && (stages.complexity || stages.arbitrariness)) {
    throw InvalidArgument("complexity and arbitrariness need the evaluation stage");
  }
  DatasetAudit audit;
  audit.dataset = dataset;
  audit.awareness = awareness;
  audit.attributes = AttributesOf(dataset);

  if (stages.evaluation) {
    StageTimer timer(audit.timings_ms["evaluation"]);
    const auto plans = eval::MakeSplitPlans(dataset.n_rows, config.folds, config.n_random,
                                            StageSeed(config.seed, "splits"));
    audit.runs = eval::RunFamily(dataset, awareness, eval::PresetAdapters(config.presets),
                                 plans, StageSeed(config.seed, "models"));
    for (const Group group : kAllGroups) {
      if (dataset.GroupSize(group) > 0) {
        audit.auc[group] = eval::SummarizeGroup(audit.runs, group);
      }
    }
    for (const Attribute attribute : audit.attributes) {
      audit.disparities.push_back(eval::Disparity(audit.runs, attribute, config.test));
    }
  }

  if (stages.curves) {
    StageTimer timer(audit.timings_ms["curves"]);
    curves::CurveOptions options;
    options.sizes = config.curve_sizes;
    options.repeats = config.curve_repeats;
    options.presets = config.presets;
    options.seed = StageSeed(config.seed, "curves");
    audit.curves = curves::BuildCurves(dataset, awareness, options);
    for (const Attribute attribute : audit.attributes) {
      const GroupPair pair = GroupsOf(attribute);
      NAddEntry entry;
      entry.attribute = attribute;
      const auto a = audit.curves.curves.find(pair.a);
      const auto b = audit.curves.curves.find(pair.b);
      if (a == audit.curves.curves.end() || b == audit.curves.curves.end() ||
          a->second.points.size() < 4 || b->second.points.size() < 4) {
        entry.reason = "fewer than four curve points for a group";
      } else {
        entry.result = curves::CompareCurves(a->second, b->second,
                                             dataset.GroupSize(pair.a),
                                             dataset.GroupSize(pair.b));
      }
      audit.n_add.push_back(std::move(entry));
    }
  }

  if (stages.complexity) {
    StageTimer timer(audit.timings_ms["complexity"]);
    const auto registry = complexity::MetricRegistry::Default();
    audit.complexity = complexity::ComputeReports(dataset, awareness, registry);
    audit.consistency = complexity::BuildConsistencyMatrix(
        dataset.dataset_id, audit.disparities, audit.complexity, registry.Names());
  }

  if (stages.arbitrariness) {
    StageTimer timer(audit.timings_ms["arbitrariness"]);
    std::optional<std::string> family;
    if (config.sc_preset) family = std::string(trees::Name(*config.sc_preset));
    audit.predictions =
        arbitrariness::CollectPredictions(audit.runs, dataset.n_rows, family);
    audit.sc = arbitrariness::GroupProfile(audit.predictions, dataset);
  }
  return audit;
}

std::string FormatAuc(double mean, double std) {
  return Fixed(mean, 2) + " ± " + Fixed(std, 2);
}

std::string FormatPercent(const curves::ExtrapolationResult& result) {
  if (result.infinite()) return "∞";
  return std::to_string(std::llround(100.0 * result.n_add_ratio)) + "%";
}

RenderedTable RenderAucTable(const std::vector<eval::DisparityRecord>& disparities) {
  RenderedTable table;
  table.markdown = Header({"Attribute", "Group A", "AUC A", "Group B", "AUC B", "p-value",
                           "Significance"});
  table.json = Json::array();
  for (const eval::DisparityRecord& d : disparities) {
    std::string cell_a = FormatAuc(d.a.mean, d.a.std);
    std::string cell_b = FormatAuc(d.b.mean, d.b.std);
    const bool bold_a = d.winner && *d.winner == d.a.group;
    const bool bold_b = d.winner && *d.winner == d.b.group;
    const std::string p = d.insufficient_data ? "insufficient data" : PValue(d.test.p_value);
    const std::string stars = d.insufficient_data ? "" : d.test.stars;
    table.markdown += Row({std::string(Name(d.attribute)), std::string(Name(d.a.group)),
                           bold_a ? Bold(cell_a) : cell_a, std::string(Name(d.b.group)),
                           bold_b ? Bold(cell_b) : cell_b, p, EscapeStars(stars)});
    table.json.push_back({{"attribute", std::string(Name(d.attribute))},
                          {"group_a", std::string(Name(d.a.group))},
                          {"group_b", std::string(Name(d.b.group))},
                          {"auc_a", cell_a},
                          {"auc_b", cell_b},
                          {"p_value", p},
                          {"stars", stars},
                          {"bold", bold_a   ? Json(std::string(Name(d.a.group)))
                                   : bold_b ? Json(std::string(Name(d.b.group)))
                                            : Json(nullptr)}});
  }
  return table;
}

RenderedTable RenderNAddTable(const std::vector<NAddEntry>& entries) {
  RenderedTable table;
  table.markdown = Header({"Attribute", "Inferior group", "N_add", "N", "N_add / N"});
  table.json = Json::array();
  for (const NAddEntry& e : entries) {
    if (!e.result) {
      table.markdown += Row({std::string(Name(e.attribute)), "", "", "", e.reason});
      table.json.push_back({{"attribute", std::string(Name(e.attribute))},
                            {"reason", e.reason}});
      continue;
    }
    const curves::ExtrapolationResult& r = *e.result;
    const std::string n_add = r.infinite() ? "∞" : std::to_string(*r.n_add);
    const std::string percent = FormatPercent(r);
    table.markdown += Row({std::string(Name(e.attribute)), std::string(Name(r.inferior)),
                           n_add, std::to_string(r.group_size), percent});
    table.json.push_back({{"attribute", std::string(Name(e.attribute))},
                          {"inferior_group", std::string(Name(r.inferior))},
                          {"n_add", n_add},
                          {"group_size", std::to_string(r.group_size)},
                          {"percent", percent}});
  }
  return table;
}

RenderedTable RenderScTable(const arbitrariness::SelfConsistencyProfile& profile) {
  RenderedTable table;
  table.markdown = Header({"Attribute", "Group A", "CDF area A", "Group B", "CDF area B",
                           "KS", "p-value", "Significance"});
  table.json = Json::array();
  for (const auto& d : profile.disparities) {
    const GroupPair pair = GroupsOf(d.attribute);
    auto area = [&](Group g) {
      const auto it = profile.groups.find(g);
      return it == profile.groups.end() ? std::string("") : Fixed(it->second.cdf_area, 3);
    };
    std::string area_a = area(pair.a);
    std::string area_b = area(pair.b);
    const bool bold_a = d.more_arbitrary && *d.more_arbitrary == pair.a;
    const bool bold_b = d.more_arbitrary && *d.more_arbitrary == pair.b;
    const std::string ks = d.insufficient_data ? "" : Fixed(d.ks.statistic, 3);
    const std::string p = d.insufficient_data ? "insufficient data" : PValue(d.ks.p_value);
    const std::string stars = d.insufficient_data ? "" : d.ks.stars;
    table.markdown += Row({std::string(Name(d.attribute)), std::string(Name(pair.a)),
                           bold_a ? Bold(area_a) : area_a, std::string(Name(pair.b)),
                           bold_b ? Bold(area_b) : area_b, ks, p, EscapeStars(stars)});
    table.json.push_back({{"attribute", std::string(Name(d.attribute))},
                          {"group_a", std::string(Name(pair.a))},
                          {"group_b", std::string(Name(pair.b))},
                          {"area_a", area_a},
                          {"area_b", area_b},
                          {"ks", ks},
                          {"p_value", p},
                          {"stars", stars},
                          {"bold", bold_a   ? Json(std::string(Name(pair.a)))
                                   : bold_b ? Json(std::string(Name(pair.b)))
                                            : Json(nullptr)}});
  }
  return table;
}

RenderedTable RenderConsistencyTable(const complexity::ConsistencyMatrix& matrix,
                                     const std::vector<std::string>& metric_names) {
  std::ostringstream csv_text;
  complexity::WriteHeatmapHeader(csv_text, metric_names);
  complexity::WriteHeatmapRows(csv_text, matrix, metric_names);
  const csv::Table parsed = csv::Parse(csv_text.str());
  RenderedTable table;
  table.markdown = Header(parsed.header);
  table.json = Json::array();
  for (const auto& row : parsed.rows) {
    table.markdown += Row(row);
    Json entry = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) entry[parsed.header[i]] = row[i];
    table.json.push_back(std::move(entry));
  }
  return table;
}

Json DatasetSummary(const TabularDataset& dataset) {
  Json json;
  json["dataset_id"] = dataset.dataset_id;
  json["n_rows"] = dataset.n_rows;
  json["n_features"] = dataset.n_features;
  json["feature_names"] = dataset.feature_names;
  json["positives"] = std::count(dataset.target.begin(), dataset.target.end(), 1);
  json["dropped_missing_target"] = dataset.dropped_missing_target;
  std::size_t missing = 0;
  for (const std::uint8_t m : dataset.missing) missing += m;
  json["missing_rate"] =
      dataset.missing.empty() ? 0.0
                              : static_cast<double>(missing) /
                                    static_cast<double>(dataset.missing.size());
  Json groups = Json::object();
  for (const Group group : kAllGroups) {
    const std::size_t size = dataset.GroupSize(group);
    if (size == 0) continue;
    Json g = {{"n_rows", size}};
    if (dataset.has_age) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t r = 0; r < dataset.n_rows; ++r) {
        if (!dataset.InGroup(r, group) || std::isnan(dataset.age[r])) continue;
        lo = std::min(lo, dataset.age[r]);
        hi = std::max(hi, dataset.age[r]);
      }
      if (lo <= hi) g["age_range"] = {lo, hi};
    }
    groups[std::string(Name(group))] = std::move(g);
  }
  json["groups"] = std::move(groups);
  return json;
}

Json ToJson(const DatasetAudit& audit, const std::vector<std::string>& metric_names) {
  Json json;
  json["summary"] = DatasetSummary(audit.dataset);
  json["awareness"] = std::string(Name(audit.awareness));
  json["n_models"] = audit.runs.size();

  Json auc_groups = Json::object();
  for (const auto& [group, s] : audit.auc) auc_groups[std::string(Name(group))] = ToJson(s);
  Json disparities = Json::array();
  for (const auto& d : audit.disparities) disparities.push_back(eval::ToJson(d));
  json["auc"] = {{"groups", std::move(auc_groups)},
                 {"disparities", std::move(disparities)},
                 {"table", RenderAucTable(audit.disparities).json}};

  Json curve_list = Json::array();
  for (const auto& [group, curve] : audit.curves.curves) {
    curve_list.push_back(curves::ToJson(curve));
  }
  Json n_add = Json::array();
  for (const NAddEntry& e : audit.n_add) {
    Json entry = {{"attribute", std::string(Name(e.attribute))}};
    if (e.result) {
      entry["result"] = curves::ToJson(*e.result);
    } else {
      entry["reason"] = e.reason;
    }
    n_add.push_back(std::move(entry));
  }
  json["curves"] = {{"curves", std::move(curve_list)},
                    {"warnings", audit.curves.warnings},
                    {"n_add", std::move(n_add)},
                    {"table", RenderNAddTable(audit.n_add).json}};

  Json reports = Json::object();
  for (const auto& [group, r] : audit.complexity) {
    reports[std::string(Name(group))] = complexity::ToJson(r);
  }
  json["complexity"] = {
      {"groups", std::move(reports)},
      {"consistency", complexity::ToJson(audit.consistency)},
      {"table", RenderConsistencyTable(audit.consistency, metric_names).json}};

  Json sc = arbitrariness::ToJson(audit.sc);
  sc["n_runs"] = audit.predictions.n_runs;
  sc["untested_rows"] = audit.predictions.UntestedCount();
  sc["table"] = RenderScTable(audit.sc).json;
  json["self_consistency"] = std::move(sc);
  return json;
}

Json Provenance(const AuditConfig& config) {
  return {{"tool", "equiscope"},
          {"version", EQUISCOPE_VERSION},
          {"seed", config.seed},
          {"config", config.ToJson()}};
}

void CommitFiles(const fs::path& out_path, const std::map<std::string, std::string>& files) {
  fs::path out = out_path.lexically_normal();
  if (!out.has_filename()) out = out.parent_path();
  const fs::path staging = out.parent_path() / (out.filename().string() + ".partial");
  std::error_code ignored;
  fs::remove_all(staging, ignored);
  try {
    for (const auto& [name, contents] : files) {
      const fs::path target = staging / name;
      fs::create_directories(target.parent_path());
      WriteTextFile(target, contents);
    }
    for (const auto& [name, contents] : files) {
      const fs::path target = out / name;
      fs::create_directories(target.parent_path());
      fs::rename(staging / name, target);
    }
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ignored);
    throw Error(e.what());
  } catch (...) {
    fs::remove_all(staging, ignored);
    throw;
  }
  fs::remove_all(staging, ignored);
}

void RenderFull(const AuditConfig& config) {
  config.Validate();
  if (config.manifest.empty()) throw SchemaError("no manifest given");
  const DatasetManifest manifest = DatasetManifest::FromFile(config.manifest);
  std::vector<std::string> warnings;
  const std::vector<TabularDataset> datasets = PrepareDatasets(manifest, &warnings);
  const std::vector<std::string> metric_names = complexity::MetricRegistry::Default().Names();

  std::map<std::string, std::string> files;
  const std::vector<Awareness> modes = Expand(config.awareness);
  for (const Awareness awareness : modes) {
    const std::string prefix =
        modes.size() > 1 ? std::string(Name(awareness)) + "/" : std::string();
    Json report;
    report["provenance"] = Provenance(config);
    report["awareness"] = std::string(Name(awareness));
    report["warnings"] = warnings;
    report["datasets"] = Json::array();
    Json timings = Json::object();
    std::string md = "# Equiscope audit (" + std::string(Name(awareness)) + ")\n\n";
    md += "Seed " + std::to_string(config.seed) + ", " + std::to_string(config.folds) +
          " folds + " + std::to_string(config.n_random) + " random partitions.\n";
    std::ostringstream heatmap, curves_csv, cdf_csv;
    complexity::WriteHeatmapHeader(heatmap, metric_names);
    csv::WriteRow(curves_csv, {"dataset", "group", "n", "auc", "std"});
    arbitrariness::WriteCdfHeader(cdf_csv);

    for (const TabularDataset& dataset : datasets) {
      const DatasetAudit audit = AuditDataset(dataset, awareness, config);
      report["datasets"].push_back(ToJson(audit, metric_names));
      Json t = Json::object();
      for (const auto& [stage, ms] : audit.timings_ms) t[stage] = ms;
      timings[dataset.dataset_id] = std::move(t);

      md += "\n## " + dataset.dataset_id + "\n\n";
      md += std::to_string(dataset.n_rows) + " rows, " + std::to_string(dataset.n_features) +
            " features, " + std::to_string(audit.runs.size()) + " models.\n\n";
      md += "### AUC by subgroup\n\n" + RenderAucTable(audit.disparities).markdown;
      md += "\n### Additional data for parity\n\n" + RenderNAddTable(audit.n_add).markdown;
      md += "\n### Complexity consistency\n\n" +
            RenderConsistencyTable(audit.consistency, metric_names).markdown;
      md += "\n### Self-consistency\n\n" + RenderScTable(audit.sc).markdown;

      complexity::WriteHeatmapRows(heatmap, audit.consistency, metric_names);
      for (const auto& [group, curve] : audit.curves.curves) {
        for (const auto& p : curve.points) {
          csv::WriteRow(curves_csv, {dataset.dataset_id, std::string(Name(group)),
                                     std::to_string(p.n), FormatDouble(p.auc),
                                     FormatDouble(p.std)});
        }
      }
      arbitrariness::WriteCdfRows(cdf_csv, dataset.dataset_id, audit.sc);
    }
    files[prefix + "report.json"] = CanonicalDump(report);
    files[prefix + "report.md"] = md;
    files[prefix + "heatmap.csv"] = heatmap.str();
    files[prefix + "curves.csv"] = curves_csv.str();
    files[prefix + "sc_cdf.csv"] = cdf_csv.str();
    files[prefix + "timings.json"] = CanonicalDump(timings);
  }
  CommitFiles(config.out, files);
}

}  // namespace equiscope::report
