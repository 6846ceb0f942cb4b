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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "equiscope/errors.h"
#include "equiscope/stats.h"
#include "testing/synthetic.h"

namespace equiscope::report {
namespace {

namespace fs = std::filesystem;
using ::equiscope::testing::ReadFile;
using ::equiscope::testing::TempDir;

eval::DisparityRecord Record(double p_value) {
  eval::DisparityRecord d;
  d.attribute = Attribute::kSex;
  d.a = {Group::kFemale, 0.7412, 0.0123, 66};
  d.b = {Group::kMale, 0.6987, 0.0201, 66};
  d.test.p_value = p_value;
  d.test.stars = stats::SignificanceStars(p_value);
  if (p_value < 0.01) d.winner = Group::kFemale;
  return d;
}

curves::ExtrapolationResult Extrapolation(std::optional<std::uint64_t> n_add,
                                          std::size_t group_size) {
  curves::ExtrapolationResult r;
  r.inferior = Group::kOld;
  r.n_add = n_add;
  r.group_size = group_size;
  r.n_add_ratio = n_add ? static_cast<double>(*n_add) / static_cast<double>(group_size)
                        : std::numeric_limits<double>::infinity();
  return r;
}

TEST(FormatTest, AucCell) {
  EXPECT_EQ(FormatAuc(0.7412, 0.0123), "0.74 ± 0.01");
  EXPECT_EQ(FormatAuc(0.5, 0.0), "0.50 ± 0.00");
}

TEST(FormatTest, Percent) {
  EXPECT_EQ(FormatPercent(Extrapolation(1000, 520)), "192%");
  EXPECT_EQ(FormatPercent(Extrapolation(0, 520)), "0%");
  EXPECT_EQ(FormatPercent(Extrapolation(std::nullopt, 520)), "∞");
}

TEST(AucTableTest, StarsAndBold) {
  const RenderedTable t =
      RenderAucTable({Record(0.005), Record(0.05), Record(0.00005)});
  ASSERT_EQ(t.json.size(), 3u);
  EXPECT_EQ(t.json[0]["stars"], "*");
  EXPECT_EQ(t.json[0]["bold"], "female");
  EXPECT_EQ(t.json[1]["stars"], "");
  EXPECT_TRUE(t.json[1]["bold"].is_null());
  EXPECT_EQ(t.json[2]["stars"], "***");
  EXPECT_NE(t.markdown.find("**0.74 ± 0.01**"), std::string::npos);
  EXPECT_NE(t.markdown.find("\\*\\*\\*"), std::string::npos);
  // Every value shown in the markdown is also in the JSON. Stars are
  // escaped in the markdown and checked above.
  for (const auto& row : t.json) {
    for (const auto& [key, value] : row.items()) {
      if (key != "stars" && value.is_string() && !value.get<std::string>().empty()) {
        EXPECT_NE(t.markdown.find(value.get<std::string>()), std::string::npos) << key;
      }
    }
  }
}

TEST(AucTableTest, InsufficientData) {
  eval::DisparityRecord d = Record(1.0);
  d.insufficient_data = true;
  const RenderedTable t = RenderAucTable({d});
  EXPECT_EQ(t.json[0]["p_value"], "insufficient data");
  EXPECT_NE(t.markdown.find("insufficient data"), std::string::npos);
}

TEST(NAddTableTest, Cells) {
  NAddEntry finite{Attribute::kAge, Extrapolation(1000, 520), ""};
  NAddEntry infinite{Attribute::kSex, Extrapolation(std::nullopt, 300), ""};
  NAddEntry missing{Attribute::kAge, std::nullopt, "curve too short"};
  const RenderedTable t = RenderNAddTable({finite, infinite, missing});
  EXPECT_EQ(t.json[0]["percent"], "192%");
  EXPECT_EQ(t.json[0]["n_add"], "1000");
  EXPECT_EQ(t.json[1]["n_add"], "∞");
  EXPECT_EQ(t.json[2]["reason"], "curve too short");
  EXPECT_NE(t.markdown.find("| age | old | 1000 | 520 | 192% |"), std::string::npos);
}

TEST(ConfigTest, ParsesAndResolvesPaths) {
  const Json json = Json::parse(R"({"manifest": "m.json", "seed": 7, "awareness": "aware",
      "presets": ["A", "C"], "folds": 4, "n_random": 5, "curve_sizes": [0.5, 1.0],
      "curve_repeats": 2, "sc_preset": "C", "significance_test": "mann_whitney"})");
  const AuditConfig c = AuditConfig::FromJson(json, "/base");
  EXPECT_EQ(c.manifest, fs::path("/base/m.json"));
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.awareness, AwarenessMode::kAware);
  EXPECT_EQ(c.presets, (std::vector<trees::Preset>{trees::Preset::kA, trees::Preset::kC}));
  EXPECT_EQ(c.folds, 4);
  EXPECT_EQ(c.n_random, 5);
  EXPECT_EQ(c.curve_repeats, 2);
  EXPECT_EQ(*c.sc_preset, trees::Preset::kC);
  EXPECT_EQ(c.test, eval::SignificanceTest::kMannWhitney);
  EXPECT_EQ(AuditConfig::FromJson(c.ToJson(), "/").seed, 7u);
}

TEST(ConfigTest, RejectsBadInput) {
  EXPECT_THROW(AuditConfig::FromJson(Json::parse(R"({"sed": 1})"), "."), SchemaError);
  EXPECT_THROW(AuditConfig::FromJson(Json::parse(R"({"folds": 1})"), "."), SchemaError);
  EXPECT_THROW(AuditConfig::FromJson(Json::parse(R"({"presets": ["Z"]})"), "."), SchemaError);
  EXPECT_THROW(AuditConfig::FromJson(Json::parse(R"({"seed": "x"})"), "."), SchemaError);
  EXPECT_THROW(AuditConfig::FromJson(Json::parse("[]"), "."), SchemaError);
  EXPECT_THROW(ParseAwarenessMode("sometimes"), InvalidArgument);
  EXPECT_EQ(Expand(AwarenessMode::kBoth).size(), 2u);
}

TEST(SeedTest, StagesAreIndependent) {
  EXPECT_NE(StageSeed(1, "splits"), StageSeed(1, "models"));
  EXPECT_NE(StageSeed(1, "splits"), StageSeed(2, "splits"));
  EXPECT_EQ(StageSeed(1, "curves"), StageSeed(1, "curves"));
}

TEST(CommitTest, WritesAllFiles) {
  TempDir dir("commit");
  const fs::path out = dir.path() / "out";
  CommitFiles(out, {{"a.txt", "alpha"}, {"sub/b.txt", "beta"}});
  EXPECT_EQ(ReadFile(out / "a.txt"), "alpha");
  EXPECT_EQ(ReadFile(out / "sub" / "b.txt"), "beta");
  EXPECT_FALSE(fs::exists(dir.path() / "out.partial"));
}

TEST(CommitTest, FailureLeavesNothingBehind) {
  TempDir dir("commit");
  const fs::path out = dir.path() / "out";
  // A directory where a file must go makes the rename fail.
  fs::create_directories(out / "b.txt" / "blocker");
  EXPECT_THROW(CommitFiles(out, {{"a.txt", "alpha"}, {"b.txt", "beta"}}), Error);
  EXPECT_FALSE(fs::exists(dir.path() / "out.partial"));
}

TEST(AuditTest, StageDependencies) {
  TabularDataset ds;
  Stages stages;
  stages.evaluation = false;
  EXPECT_THROW(AuditDataset(ds, Awareness::kAware, AuditConfig{}, stages), InvalidArgument);
}

AuditConfig SmallConfig(const fs::path& manifest, const fs::path& out) {
  AuditConfig c;
  c.manifest = manifest;
  c.seed = 5;
  c.awareness = AwarenessMode::kAware;
  c.presets = {trees::Preset::kA};
  c.n_random = 3;
  c.curve_sizes = {0.25, 0.5, 0.75, 1.0};
  c.curve_repeats = 1;
  c.out = out;
  return c;
}

TEST(RenderTest, SmallAuditIsReproducible) {
  TempDir dir("render");
  const fs::path manifest =
      ::equiscope::testing::WriteDisparityDataset(dir.path(), 180, 21);
  RenderFull(SmallConfig(manifest, dir.path() / "one"));
  RenderFull(SmallConfig(manifest, dir.path() / "two"));
  for (const char* name :
       {"report.json", "report.md", "heatmap.csv", "curves.csv", "sc_cdf.csv", "timings.json"}) {
    EXPECT_TRUE(fs::exists(dir.path() / "one" / name)) << name;
  }
  const std::string a = ReadFile(dir.path() / "one" / "report.json");
  EXPECT_EQ(a, ReadFile(dir.path() / "two" / "report.json"));

  const Json report = Json::parse(a);
  EXPECT_EQ(report["provenance"]["seed"], 5);
  const Json& d = report["datasets"][0];
  EXPECT_EQ(d["summary"]["dataset_id"], "disparity");
  EXPECT_EQ(d["summary"]["n_rows"], 180);
  EXPECT_FALSE(d.contains("timings_ms"));
  EXPECT_EQ(ReadFile(dir.path() / "one" / "heatmap.csv").substr(0, 33),
            "dataset,attribute,f1,l1,n3,t2,ir\n");
}

TEST(RenderTest, BothModesGetSubtrees) {
  TempDir dir("render");
  const fs::path manifest =
      ::equiscope::testing::WriteDisparityDataset(dir.path(), 120, 22);
  AuditConfig c = SmallConfig(manifest, dir.path() / "out");
  c.awareness = AwarenessMode::kBoth;
  c.n_random = 0;
  RenderFull(c);
  const Json aware = Json::parse(ReadFile(dir.path() / "out" / "aware" / "report.json"));
  const Json unaware = Json::parse(ReadFile(dir.path() / "out" / "unaware" / "report.json"));
  EXPECT_EQ(aware["awareness"], "aware");
  EXPECT_EQ(unaware["awareness"], "unaware");
}

TEST(RenderTest, BadManifestWritesNothing) {
  TempDir dir("render");
  std::ofstream(dir.path() / "bad.json") << R"({"dataset_id": "x"})";
  AuditConfig c = SmallConfig(dir.path() / "bad.json", dir.path() / "out");
  EXPECT_THROW(RenderFull(c), Error);
  EXPECT_FALSE(fs::exists(dir.path() / "out"));
}

}  // namespace
}  // namespace equiscope::report
