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

#include "equiscope/evaluation.h"

#include <algorithm>

#include "equiscope/errors.h"
#include "equiscope/parallel.h"
#include "equiscope/random.h"

namespace equiscope::eval {
namespace {

SplitPlan PlanFromTest(int run_id, SplitKind kind, std::size_t n_rows,
                       std::vector<std::size_t> test) {
  std::sort(test.begin(), test.end());
  std::vector<std::uint8_t> in_test(n_rows, 0);
  for (const std::size_t r : test) in_test[r] = 1;
  SplitPlan plan;
  plan.run_id = run_id;
  plan.kind = kind;
  plan.test_rows = std::move(test);
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (!in_test[r]) plan.train_rows.push_back(r);
  }
  return plan;
}

std::vector<double> DefinedAucs(const std::vector<ModelRun>& runs, Group group) {
  std::vector<double> values;
  for (const ModelRun& run : runs) {
    const auto it = run.group_auc.find(group);
    if (it != run.group_auc.end()) values.push_back(it->second);
  }
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace

std::vector<SplitPlan> MakeSplitPlans(std::size_t n_rows, int folds, int n_random,
                                      std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("need at least two folds");
  if (n_random < 0) throw InvalidArgument("n_random must be >= 0");
  if (n_rows < 3 * static_cast<std::size_t>(folds)) {
    throw InvalidArgument("too few rows (" + std::to_string(n_rows) + ") for " +
                          std::to_string(folds) + "-fold plans");
  }
  std::vector<SplitPlan> plans;
  const auto k = static_cast<std::size_t>(folds);

  Rng cv_rng(DeriveSeed(seed, {TagOf("cv")}));
  const std::vector<std::size_t> perm = Permutation(n_rows, cv_rng);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t begin = f * n_rows / k;
    const std::size_t end = (f + 1) * n_rows / k;
    plans.push_back(PlanFromTest(static_cast<int>(f), SplitKind::kCvFold, n_rows,
                                 {perm.begin() + begin, perm.begin() + end}));
  }
  const std::size_t test_size = n_rows / k;
  for (int r = 0; r < n_random; ++r) {
    Rng rng(DeriveSeed(seed, {TagOf("random"), static_cast<std::uint64_t>(r)}));
    const std::vector<std::size_t> p = Permutation(n_rows, rng);
    plans.push_back(PlanFromTest(folds + r, SplitKind::kRandom, n_rows,
                                 {p.begin(), p.begin() + test_size}));
  }
  return plans;
}

AdapterList PresetAdapters(const std::vector<trees::Preset>& presets) {
  AdapterList adapters;
  for (const trees::Preset p : presets) {
    adapters.push_back(std::make_shared<trees::BoostedTreesAdapter>(p));
  }
  return adapters;
}

std::uint64_t RunSeed(std::uint64_t master_seed, const std::string& algorithm,
                      int run_id) {
  return DeriveSeed(master_seed,
                    {TagOf("run"), TagOf(algorithm), static_cast<std::uint64_t>(run_id)});
}

std::vector<ModelRun> RunFamily(const TabularDataset& dataset, Awareness awareness,
                                const AdapterList& adapters,
                                const std::vector<SplitPlan>& plans,
                                std::uint64_t master_seed) {
  if (plans.empty()) throw InvalidArgument("no split plans");
  if (adapters.empty()) throw InvalidArgument("no model families");
  const FeatureMatrix view = FeatureView(dataset, awareness);
  std::vector<ModelRun> runs(adapters.size() * plans.size());

  ParallelFor(runs.size(), [&](std::size_t task) {
    const auto& adapter = *adapters[task / plans.size()];
    const SplitPlan& plan = plans[task % plans.size()];
    ModelRun& run = runs[task];
    run.algorithm = adapter.Id();
    run.split = plan;
    run.seed = RunSeed(master_seed, run.algorithm, plan.run_id);
    try {
      std::vector<int> train_labels;
      for (const std::size_t r : plan.train_rows) train_labels.push_back(dataset.target[r]);
      const auto model =
          adapter.Train(view.SelectRows(plan.train_rows), train_labels, run.seed);
      run.scores = model->Score(view.SelectRows(plan.test_rows));
      for (const std::size_t r : plan.test_rows) run.labels.push_back(dataset.target[r]);

      for (const Group group : kAllGroups) {
        std::vector<double> scores;
        std::vector<int> labels;
        for (std::size_t i = 0; i < plan.test_rows.size(); ++i) {
          if (!dataset.InGroup(plan.test_rows[i], group)) continue;
          scores.push_back(run.scores[i]);
          labels.push_back(run.labels[i]);
        }
        const auto positives = std::count(labels.begin(), labels.end(), 1);
        if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
          continue;
        }
        run.group_auc[group] = stats::Auroc(scores, labels);
      }
    } catch (const std::exception& e) {
      throw Error("model run failed (algorithm " + run.algorithm + ", run " +
                  std::to_string(plan.run_id) + "): " + e.what());
    }
  });
  return runs;
}

std::string_view Name(SignificanceTest test) {
  return test == SignificanceTest::kWelch ? "welch" : "mann_whitney";
}

SignificanceTest ParseSignificanceTest(std::string_view name) {
  if (name == "welch") return SignificanceTest::kWelch;
  if (name == "mann_whitney") return SignificanceTest::kMannWhitney;
  throw InvalidArgument("significance test must be welch or mann_whitney");
}

GroupAucStats SummarizeGroup(const std::vector<ModelRun>& runs, Group group) {
  const std::vector<double> values = DefinedAucs(runs, group);
  GroupAucStats s;
  s.group = group;
  s.n_runs = values.size();
  if (!values.empty()) {
    s.mean = stats::Mean(values);
    s.std = stats::SampleStdDev(values);
  }
  return s;
}

DisparityRecord Disparity(const std::vector<ModelRun>& runs, Attribute attribute,
                          SignificanceTest test) {
  const GroupPair pair = GroupsOf(attribute);
  DisparityRecord record;
  record.attribute = attribute;
  record.a = SummarizeGroup(runs, pair.a);
  record.b = SummarizeGroup(runs, pair.b);
  if (record.a.n_runs < 2 || record.b.n_runs < 2) {
    record.insufficient_data = true;
    return record;
  }
  const std::vector<double> a = DefinedAucs(runs, pair.a);
  const std::vector<double> b = DefinedAucs(runs, pair.b);
  record.test = test == SignificanceTest::kWelch ? stats::WelchTTest(a, b)
                                                 : stats::MannWhitneyUTest(a, b);
  if (record.test.p_value < 0.01 && record.a.mean != record.b.mean) {
    record.winner = record.a.mean > record.b.mean ? pair.a : pair.b;
  }
  return record;
}

Json ToJson(const ModelRun& run, const TabularDataset& dataset) {
  Json json;
  json["algorithm"] = run.algorithm;
  json["run_id"] = run.split.run_id;
  json["kind"] = run.split.kind == SplitKind::kCvFold ? "cv_fold" : "random";
  json["seed"] = run.seed;
  std::vector<std::uint64_t> test_ids;
  for (const std::size_t r : run.split.test_rows) test_ids.push_back(dataset.row_ids[r]);
  json["test_row_ids"] = test_ids;
  json["n_train"] = run.split.train_rows.size();
  json["scores"] = run.scores;
  json["labels"] = run.labels;
  Json aucs = Json::object();
  for (const auto& [group, auc] : run.group_auc) aucs[std::string(Name(group))] = auc;
  json["group_auc"] = aucs;
  return json;
}

Json ToJson(const GroupAucStats& s) {
  Json json;
  json["group"] = std::string(Name(s.group));
  json["mean"] = s.mean;
  json["std"] = s.std;
  json["n_runs"] = s.n_runs;
  return json;
}

Json ToJson(const DisparityRecord& record) {
  Json json;
  json["attribute"] = std::string(Name(record.attribute));
  json["group_a"] = ToJson(record.a);
  json["group_b"] = ToJson(record.b);
  json["insufficient_data"] = record.insufficient_data;
  if (!record.insufficient_data) {
    json["statistic"] = EncodeDouble(record.test.statistic);
    json["p_value"] = record.test.p_value;
    json["stars"] = record.test.stars;
  }
  json["winner"] = record.winner ? Json(std::string(Name(*record.winner))) : Json(nullptr);
  return json;
}

}  // namespace equiscope::eval
