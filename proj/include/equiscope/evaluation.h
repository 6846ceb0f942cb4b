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

// Validation protocol: per model family, one k-fold cross-validation plus a
// number of random train/test repartitions, and per-subgroup AUC
// aggregation with significance testing.

#ifndef EQUISCOPE_EVALUATION_H_
#define EQUISCOPE_EVALUATION_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "equiscope/boosted_trees.h"
#include "equiscope/dataset.h"
#include "equiscope/json_io.h"
#include "equiscope/stats.h"

namespace equiscope::eval {

enum class SplitKind { kCvFold, kRandom };

// Row positions index into the dataset the plan was made for.
struct SplitPlan {
  int run_id = 0;
  SplitKind kind = SplitKind::kCvFold;
  std::vector<std::size_t> train_rows;  // sorted
  std::vector<std::size_t> test_rows;   // sorted
};

// `folds` cross-validation folds from one permutation, then `n_random`
// independent partitions with floor(n_rows / folds) test rows each. Run ids
// are 0..folds-1 for the folds and continue for the random runs. Throws
// InvalidArgument when n_rows < 3 * folds.
std::vector<SplitPlan> MakeSplitPlans(std::size_t n_rows, int folds, int n_random,
                                      std::uint64_t seed);

struct ModelRun {
  std::string algorithm;  // adapter id, e.g. "A"
  SplitPlan split;
  std::uint64_t seed = 0;
  std::vector<double> scores;  // aligned with split.test_rows
  std::vector<int> labels;     // aligned with split.test_rows
  // AUC per group; absent when the group's test slice lacks a class.
  std::map<Group, double> group_auc;
};

using AdapterList = std::vector<std::shared_ptr<const trees::ClassifierAdapter>>;

AdapterList PresetAdapters(const std::vector<trees::Preset>& presets);

// One ModelRun per (adapter, plan), ordered by adapter then run id. Tasks run
// concurrently; results do not depend on the worker count. A failing run
// aborts with its identity in the error message.
std::vector<ModelRun> RunFamily(const TabularDataset& dataset, Awareness awareness,
                                const AdapterList& adapters,
                                const std::vector<SplitPlan>& plans,
                                std::uint64_t master_seed);

// Seed handed to the adapter for one run.
std::uint64_t RunSeed(std::uint64_t master_seed, const std::string& algorithm,
                      int run_id);

enum class SignificanceTest { kWelch, kMannWhitney };
std::string_view Name(SignificanceTest test);
SignificanceTest ParseSignificanceTest(std::string_view name);

struct GroupAucStats {
  Group group = Group::kOverall;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over runs
  std::size_t n_runs = 0;
};

// Statistics over the runs where the group's AUC is defined. Values are
// sorted before summation so the run order never matters.
GroupAucStats SummarizeGroup(const std::vector<ModelRun>& runs, Group group);

struct DisparityRecord {
  Attribute attribute = Attribute::kSex;
  GroupAucStats a;
  GroupAucStats b;
  bool insufficient_data = false;  // a group has fewer than two AUC samples
  stats::TestResult test;
  std::optional<Group> winner;  // higher mean, only when p < 0.01
};

DisparityRecord Disparity(const std::vector<ModelRun>& runs, Attribute attribute,
                          SignificanceTest test = SignificanceTest::kWelch);

Json ToJson(const ModelRun& run, const TabularDataset& dataset);
Json ToJson(const GroupAucStats& stats);
Json ToJson(const DisparityRecord& record);

}  // namespace equiscope::eval

#endif  // EQUISCOPE_EVALUATION_H_
