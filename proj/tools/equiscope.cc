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

// equiscope: subgroup disparity audits for tabular binary classification.
//
// Exit codes: 0 ok, 2 schema or usage error, 3 runtime failure.

#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "equiscope/arbitrariness.h"
#include "equiscope/complexity.h"
#include "equiscope/csv.h"
#include "equiscope/dataset.h"
#include "equiscope/errors.h"
#include "equiscope/evaluation.h"
#include "equiscope/json_io.h"
#include "equiscope/learning_curves.h"
#include "equiscope/report.h"

namespace {

using namespace equiscope;
namespace fs = std::filesystem;

constexpr int kExitSchema = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string manifest;
  std::string config;
  std::string out;
  std::string awareness;
  std::optional<std::uint64_t> seed;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& flags, bool manifest_required) {
  auto* positional = cmd->add_option("manifest", flags.manifest, "dataset manifest (JSON)");
  if (manifest_required) positional->required();
  cmd->add_option("--config", flags.config, "audit config (JSON)");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--awareness", flags.awareness, "aware, unaware or both")
      ->check(CLI::IsMember({"aware", "unaware", "both"}));
  cmd->add_option("--seed", flags.seed, "master seed");
}

report::AuditConfig ResolveConfig(const CommonFlags& flags) {
  report::AuditConfig config;
  if (!flags.config.empty()) config = report::AuditConfig::FromFile(flags.config);
  if (!flags.manifest.empty()) config.manifest = flags.manifest;
  if (!flags.out.empty()) config.out = flags.out;
  if (!flags.awareness.empty()) {
    config.awareness = report::ParseAwarenessMode(flags.awareness);
  }
  if (flags.seed) config.seed = *flags.seed;
  if (config.manifest.empty()) throw SchemaError("no manifest given");
  return config;
}

std::vector<TabularDataset> Load(const report::AuditConfig& config,
                                 std::vector<std::string>* warnings) {
  return PrepareDatasets(DatasetManifest::FromFile(config.manifest), warnings);
}

std::string Prefix(const report::AuditConfig& config, Awareness awareness) {
  return config.awareness == report::AwarenessMode::kBoth
             ? std::string(Name(awareness)) + "/"
             : std::string();
}

Json Envelope(const report::AuditConfig& config, Awareness awareness) {
  return {{"provenance", report::Provenance(config)},
          {"awareness", std::string(Name(awareness))},
          {"datasets", Json::array()}};
}

int IngestValidate(const CommonFlags& flags) {
  const report::AuditConfig config = ResolveConfig(flags);
  std::vector<std::string> warnings;
  const auto datasets = Load(config, &warnings);
  Json out = {{"provenance", report::Provenance(config)},
              {"warnings", warnings},
              {"datasets", Json::array()}};
  for (const TabularDataset& ds : datasets) {
    out["datasets"].push_back(report::DatasetSummary(ds));
  }
  const std::string text = CanonicalDump(out);
  std::cout << text;
  if (!flags.out.empty()) report::CommitFiles(config.out, {{"ingest.json", text}});
  return 0;
}

int AuditRun(const CommonFlags& flags) {
  const report::AuditConfig config = ResolveConfig(flags);
  std::vector<std::string> warnings;
  const auto datasets = Load(config, &warnings);
  std::map<std::string, std::string> files;
  for (const Awareness awareness : report::Expand(config.awareness)) {
    Json runs = Envelope(config, awareness);
    Json disparities = Envelope(config, awareness);
    for (const TabularDataset& ds : datasets) {
      const auto audit = report::AuditDataset(
          ds, awareness, config, {.curves = false, .complexity = false, .arbitrariness = false});
      Json run_list = Json::array();
      for (const auto& run : audit.runs) run_list.push_back(eval::ToJson(run, ds));
      runs["datasets"].push_back({{"dataset_id", ds.dataset_id}, {"runs", run_list}});
      Json records = Json::array();
      for (const auto& d : audit.disparities) records.push_back(eval::ToJson(d));
      Json groups = Json::object();
      for (const auto& [g, s] : audit.auc) groups[std::string(Name(g))] = eval::ToJson(s);
      disparities["datasets"].push_back({{"dataset_id", ds.dataset_id},
                                         {"groups", groups},
                                         {"disparities", records},
                                         {"table", report::RenderAucTable(audit.disparities).json}});
      std::cout << ds.dataset_id << " (" << Name(awareness) << ")\n"
                << report::RenderAucTable(audit.disparities).markdown;
    }
    const std::string prefix = Prefix(config, awareness);
    files[prefix + "runs.json"] = CanonicalDump(runs);
    files[prefix + "disparities.json"] = CanonicalDump(disparities);
  }
  report::CommitFiles(config.out, files);
  return 0;
}

int Curves(const CommonFlags& flags, const std::string& attribute_name) {
  const report::AuditConfig config = ResolveConfig(flags);
  std::optional<Attribute> only;
  if (!attribute_name.empty()) only = ParseAttribute(attribute_name);
  std::vector<std::string> warnings;
  const auto datasets = Load(config, &warnings);
  std::map<std::string, std::string> files;
  for (const Awareness awareness : report::Expand(config.awareness)) {
    Json curves_json = Envelope(config, awareness);
    Json nadd_json = Envelope(config, awareness);
    std::ostringstream csv_text;
    csv::WriteRow(csv_text, {"dataset", "group", "n", "auc", "std"});
    for (const TabularDataset& ds : datasets) {
      auto audit = report::AuditDataset(
          ds, awareness, config,
          {.evaluation = false, .curves = true, .complexity = false, .arbitrariness = false});
      if (only) {
        std::erase_if(audit.n_add, [&](const report::NAddEntry& e) {
          return e.attribute != *only;
        });
        if (audit.n_add.empty()) {
          throw SchemaError("dataset " + ds.dataset_id + " has no " +
                            std::string(Name(*only)) + " attribute");
        }
      }
      Json list = Json::array();
      for (const auto& [group, curve] : audit.curves.curves) {
        list.push_back(curves::ToJson(curve));
        for (const auto& p : curve.points) {
          csv::WriteRow(csv_text, {ds.dataset_id, std::string(Name(group)),
                                   std::to_string(p.n), FormatDouble(p.auc),
                                   FormatDouble(p.std)});
        }
      }
      curves_json["datasets"].push_back({{"dataset_id", ds.dataset_id},
                                         {"curves", list},
                                         {"warnings", audit.curves.warnings}});
      Json entries = Json::array();
      for (const auto& e : audit.n_add) {
        Json entry = {{"attribute", std::string(Name(e.attribute))}};
        if (e.result) {
          entry["result"] = curves::ToJson(*e.result);
        } else {
          entry["reason"] = e.reason;
        }
        entries.push_back(entry);
      }
      nadd_json["datasets"].push_back({{"dataset_id", ds.dataset_id},
                                       {"n_add", entries},
                                       {"table", report::RenderNAddTable(audit.n_add).json}});
      std::cout << ds.dataset_id << " (" << Name(awareness) << ")\n"
                << report::RenderNAddTable(audit.n_add).markdown;
    }
    const std::string prefix = Prefix(config, awareness);
    files[prefix + "curves.json"] = CanonicalDump(curves_json);
    files[prefix + "nadd.json"] = CanonicalDump(nadd_json);
    files[prefix + "curves.csv"] = csv_text.str();
  }
  report::CommitFiles(config.out, files);
  return 0;
}

int Complexity(const CommonFlags& flags) {
  const report::AuditConfig config = ResolveConfig(flags);
  std::vector<std::string> warnings;
  const auto datasets = Load(config, &warnings);
  const auto names = complexity::MetricRegistry::Default().Names();
  std::map<std::string, std::string> files;
  for (const Awareness awareness : report::Expand(config.awareness)) {
    Json out = Envelope(config, awareness);
    std::ostringstream heatmap;
    complexity::WriteHeatmapHeader(heatmap, names);
    for (const TabularDataset& ds : datasets) {
      const auto audit = report::AuditDataset(
          ds, awareness, config, {.curves = false, .complexity = true, .arbitrariness = false});
      Json groups = Json::object();
      for (const auto& [g, r] : audit.complexity) {
        groups[std::string(Name(g))] = complexity::ToJson(r);
      }
      out["datasets"].push_back({{"dataset_id", ds.dataset_id},
                                 {"groups", groups},
                                 {"consistency", complexity::ToJson(audit.consistency)}});
      complexity::WriteHeatmapRows(heatmap, audit.consistency, names);
    }
    const std::string prefix = Prefix(config, awareness);
    files[prefix + "complexity.json"] = CanonicalDump(out);
    files[prefix + "heatmap.csv"] = heatmap.str();
    std::cout << heatmap.str();
  }
  report::CommitFiles(config.out, files);
  return 0;
}

int Arbitrariness(const CommonFlags& flags) {
  const report::AuditConfig config = ResolveConfig(flags);
  std::vector<std::string> warnings;
  const auto datasets = Load(config, &warnings);
  std::map<std::string, std::string> files;
  for (const Awareness awareness : report::Expand(config.awareness)) {
    Json profile = Envelope(config, awareness);
    std::ostringstream cdf;
    arbitrariness::WriteCdfHeader(cdf);
    const std::string prefix = Prefix(config, awareness);
    for (const TabularDataset& ds : datasets) {
      const auto audit = report::AuditDataset(
          ds, awareness, config, {.curves = false, .complexity = false, .arbitrariness = true});
      Json entry = arbitrariness::ToJson(audit.sc);
      entry["dataset_id"] = ds.dataset_id;
      entry["n_runs"] = audit.predictions.n_runs;
      entry["untested_rows"] = audit.predictions.UntestedCount();
      profile["datasets"].push_back(entry);
      std::ostringstream items;
      arbitrariness::WriteItemsCsv(items, audit.sc, ds);
      files[prefix + (datasets.size() > 1 ? ds.dataset_id + "_" : "") + "sc_items.csv"] =
          items.str();
      arbitrariness::WriteCdfRows(cdf, ds.dataset_id, audit.sc);
      std::cout << ds.dataset_id << " (" << Name(awareness) << ")\n"
                << report::RenderScTable(audit.sc).markdown;
    }
    files[prefix + "sc_profile.json"] = CanonicalDump(profile);
    files[prefix + "sc_cdf.csv"] = cdf.str();
  }
  report::CommitFiles(config.out, files);
  return 0;
}

int Report(const CommonFlags& flags) {
  const report::AuditConfig config = ResolveConfig(flags);
  report::RenderFull(config);
  std::cout << "report written to " << config.out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equiscope: subgroup disparity audits for tabular classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EQUISCOPE_VERSION);

  CommonFlags ingest_flags, audit_flags, curve_flags, complexity_flags, arb_flags,
      report_flags;
  std::string attribute;

  auto* ingest = app.add_subcommand("ingest", "dataset ingestion");
  ingest->require_subcommand(1);
  auto* validate = ingest->add_subcommand("validate", "load a manifest and print a summary");
  AddCommonFlags(validate, ingest_flags, true);

  auto* audit = app.add_subcommand("audit", "model-family evaluation");
  audit->require_subcommand(1);
  auto* run = audit->add_subcommand("run", "train the model family, write runs and disparities");
  AddCommonFlags(run, audit_flags, false);

  auto* curves_cmd = app.add_subcommand("curves", "learning curves and additional-data estimates");
  AddCommonFlags(curves_cmd, curve_flags, false);
  curves_cmd->add_option("--attribute", attribute, "sex or age")
      ->check(CLI::IsMember({"sex", "age"}));

  auto* complexity_cmd = app.add_subcommand("complexity", "per-group complexity metrics");
  AddCommonFlags(complexity_cmd, complexity_flags, false);

  auto* arb_cmd = app.add_subcommand("arbitrariness", "self-consistency profiles");
  AddCommonFlags(arb_cmd, arb_flags, false);

  auto* report_cmd = app.add_subcommand("report", "full audit with all reports");
  AddCommonFlags(report_cmd, report_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSchema;
  }

  try {
    if (*validate) return IngestValidate(ingest_flags);
    if (*run) return AuditRun(audit_flags);
    if (*curves_cmd) return Curves(curve_flags, attribute);
    if (*complexity_cmd) return Complexity(complexity_flags);
    if (*arb_cmd) return Arbitrariness(arb_flags);
    if (*report_cmd) return Report(report_flags);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitSchema;
}
