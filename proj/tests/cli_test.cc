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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "equiscope/json_io.h"
#include "testing/synthetic.h"

namespace equiscope {
namespace {

namespace fs = std::filesystem;
using ::equiscope::testing::ReadFile;
using ::equiscope::testing::TempDir;

struct Result {
  int code = -1;
  std::string output;
};

Result RunCli(const std::string& args) {
  const std::string command = std::string(EQUISCOPE_CLI) + " " + args + " 2>&1";
  Result result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  char buffer[4096];
  std::size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) result.output.append(buffer, n);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    manifest_ = ::equiscope::testing::WriteDisparityDataset(dir_.path(), 150, 31);
    config_ = dir_.path() / "config.json";
    std::ofstream(config_) << R"({"presets": ["A"], "n_random": 2, "curve_repeats": 1,
        "curve_sizes": [0.25, 0.5, 0.75, 1.0], "awareness": "aware"})";
  }
  std::string Common(const std::string& out) const {
    return manifest_.string() + " --config " + config_.string() + " --out " +
           (dir_.path() / out).string();
  }

  TempDir dir_{"cli"};
  fs::path manifest_;
  fs::path config_;
};

TEST_F(CliTest, IngestValidatePrintsSummary) {
  const Result r = RunCli("ingest validate " + manifest_.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("\"disparity\""), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(RunCli("ingest validate " + (dir_.path() / "missing.json").string()).code, 2);
  EXPECT_EQ(RunCli("report --no-such-flag").code, 2);
  EXPECT_EQ(RunCli("curves " + manifest_.string() + " --attribute height").code, 2);
  std::ofstream(dir_.path() / "bad.json") << R"({"seed": 1, "colour": "red"})";
  EXPECT_EQ(RunCli("report " + manifest_.string() + " --config " +
                (dir_.path() / "bad.json").string())
                .code,
            2);
  EXPECT_EQ(RunCli("--help").code, 0);
}

TEST_F(CliTest, SubcommandsWriteTheirOutputs) {
  ASSERT_EQ(RunCli("audit run " + Common("audit")).code, 0);
  EXPECT_TRUE(fs::exists(dir_.path() / "audit" / "runs.json"));
  EXPECT_TRUE(fs::exists(dir_.path() / "audit" / "disparities.json"));

  ASSERT_EQ(RunCli("curves " + Common("curves") + " --attribute sex").code, 0);
  EXPECT_TRUE(fs::exists(dir_.path() / "curves" / "nadd.json"));
  EXPECT_TRUE(fs::exists(dir_.path() / "curves" / "curves.csv"));

  ASSERT_EQ(RunCli("complexity " + Common("complexity")).code, 0);
  EXPECT_TRUE(fs::exists(dir_.path() / "complexity" / "heatmap.csv"));

  ASSERT_EQ(RunCli("arbitrariness " + Common("arb")).code, 0);
  EXPECT_TRUE(fs::exists(dir_.path() / "arb" / "sc_items.csv"));
  EXPECT_TRUE(fs::exists(dir_.path() / "arb" / "sc_cdf.csv"));
}

TEST_F(CliTest, ReportRecordsSeed) {
  const Result r = RunCli("report " + Common("report") + " --seed 77");
  ASSERT_EQ(r.code, 0) << r.output;
  const Json report = Json::parse(ReadFile(dir_.path() / "report" / "report.json"));
  EXPECT_EQ(report["provenance"]["seed"], 77);
  EXPECT_TRUE(fs::exists(dir_.path() / "report" / "report.md"));
}

}  // namespace
}  // namespace equiscope
