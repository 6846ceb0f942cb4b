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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "equiscope/arbitrariness.h"
#include "equiscope/boosted_trees.h"
#include "equiscope/complexity.h"
#include "equiscope/evaluation.h"
#include "equiscope/learning_curves.h"
#include "equiscope/random.h"
#include "equiscope/report.h"
#include "equiscope/stats.h"
#include "testing/oracles.h"
#include "testing/synthetic.h"

namespace equiscope {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Collects failed sub-checks of one criterion.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  bool ok() const { return failures_.empty(); }
  std::string Failures() const {
    std::string out;
    for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + f;
    return out;
  }

 private:
  std::vector<std::string> failures_;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

void Criterion1(Check& c) {
  const auto start = Clock::now();
  Rng rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + UniformIndex(rng, 49);
    stats::ScoredSample s;
    for (std::size_t i = 0; i < n; ++i) {
      s.scores.push_back(static_cast<double>(UniformIndex(rng, 5)) / 4.0);
      s.labels.push_back(static_cast<int>(UniformIndex(rng, 2)));
    }
    s.labels[0] = 1;
    s.labels[1] = 0;
    worst = std::max(worst, std::abs(stats::Auroc(s) -
                                     ::equiscope::testing::BruteForceAuc(s.scores, s.labels)));
  }
  const double secs = Seconds(start);
  c.Expect(worst <= 1e-12, "max |diff| " + Fmt(worst));
  c.Expect(secs < 1.0, "runtime " + Fmt(secs) + " s");
}

void Criterion2(Check& c) {
  for (int m = 2; m <= 12; ++m) {
    for (int n1 = 0; n1 <= m; ++n1) {
      const auto f = ::equiscope::testing::EnumeratePairAgreement(n1, m - n1);
      const double exact = static_cast<double>(f.numerator) / static_cast<double>(f.denominator);
      const double got = arbitrariness::SelfConsistency(n1, m - n1);
      c.Expect(got == exact, "n1=" + std::to_string(n1) + " n0=" + std::to_string(m - n1));
    }
  }
}

void Criterion3(Check& c) {
  Rng rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(1 + UniformIndex(rng, 100)), b(1 + UniformIndex(rng, 100));
    for (double& v : a) v = std::round(10 * StandardNormal(rng)) / 10;
    for (double& v : b) v = std::round(10 * (0.3 + StandardNormal(rng))) / 10;
    worst = std::max(worst, std::abs(stats::KsTwoSample(a, b).statistic -
                                     ::equiscope::testing::BruteForceKsGap(a, b)));
  }
  c.Expect(worst <= 1e-12, "max |diff| " + Fmt(worst));
  const std::vector<double> x = {0.1, 0.5, 0.5, 0.9};
  c.Expect(stats::KsTwoSample(x, x).statistic == 0.0, "identical samples");
  const std::vector<double> y = {1.1, 1.2, 1.5};
  c.Expect(stats::KsTwoSample(x, y).statistic == 1.0, "disjoint supports");
}

double HeldOutAuc(trees::Preset preset, const ::equiscope::testing::LabeledData& data,
                  std::uint64_t seed) {
  using ::equiscope::testing::Slice;
  const std::size_t cut = data.y.size() * 2 / 3;
  const auto train = Slice(data, 0, cut);
  const auto test = Slice(data, cut, data.y.size());
  const auto model = trees::Train(trees::BoostConfig::ForPreset(preset, seed), train.x, train.y);
  return stats::Auroc(trees::Score(model, test.x), test.y);
}

void Criterion4(Check& c) {
  using ::equiscope::testing::SeparableData;
  const auto start = Clock::now();
  for (const trees::Preset preset : trees::kAllPresets) {
    const std::string name(trees::Name(preset));
    const double clean = HeldOutAuc(preset, SeparableData(1000, 1), 7);
    c.Expect(clean >= 0.95, name + " separable AUC " + Fmt(clean));
    const double missing = HeldOutAuc(preset, SeparableData(1000, 2, 0.3), 7);
    c.Expect(missing >= 0.90, name + " 30% missing AUC " + Fmt(missing));
    const auto data = SeparableData(600, 3, 0.0, true);
    const auto model = trees::Train(trees::BoostConfig::ForPreset(preset, 1), data.x, data.y);
    bool split_on_missing = false;
    for (const auto& tree : model.trees) {
      for (const auto& node : tree.nodes) {
        if (!node.IsLeaf() && node.feature == 2) split_on_missing = true;
      }
    }
    c.Expect(!split_on_missing, name + " split on all-missing column");
  }
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = ::equiscope::testing::PermutedLabels(SeparableData(600, 100 + seed), seed);
    sum += HeldOutAuc(trees::Preset::kC, data, seed);
  }
  const double mean = sum / 20.0;
  c.Expect(mean >= 0.45 && mean <= 0.55, "permuted-label mean AUC " + Fmt(mean));
  const double secs = Seconds(start);
  c.Expect(secs < 30.0, "runtime " + Fmt(secs) + " s");
}

void Criterion5(Check& c) {
  ::equiscope::testing::TempDir dir("accept5");
  const auto manifest = ::equiscope::testing::WriteDisparityDataset(dir.path(), 150, 5);
  const TabularDataset ds = LoadDataset(DatasetManifest::FromFile(manifest));
  const report::AuditConfig config;
  const auto plans = eval::MakeSplitPlans(ds.n_rows, config.folds, config.n_random, 1);
  const auto runs = eval::RunFamily(ds, Awareness::kAware, eval::PresetAdapters(config.presets),
                                    plans, 2);
  c.Expect(runs.size() == 66, std::to_string(runs.size()) + " runs");
  std::vector<int> seen(ds.n_rows, 0);
  for (const auto& plan : plans) {
    if (plan.kind != eval::SplitKind::kCvFold) continue;
    for (const auto r : plan.test_rows) ++seen[r];
  }
  bool partition = true;
  for (const int s : seen) partition = partition && s == 1;
  c.Expect(partition, "fold test sets do not partition the rows");
}

void Criterion6(Check& c) {
  ::equiscope::testing::TempDir dir("accept6");
  const auto manifest = ::equiscope::testing::WriteDisparityDataset(dir.path(), 600, 6);
  const TabularDataset ds = LoadDataset(DatasetManifest::FromFile(manifest));
  report::AuditConfig config;
  config.seed = 6;
  report::Stages stages;
  stages.curves = false;
  const report::DatasetAudit audit = report::AuditDataset(ds, Awareness::kAware, config, stages);

  const auto& d = audit.disparities.at(0);
  const double female = audit.auc.at(Group::kFemale).mean;
  const double male = audit.auc.at(Group::kMale).mean;
  c.Expect(female > male && d.test.p_value < 0.001,
           "AUC female " + Fmt(female) + " male " + Fmt(male) + " p " + Fmt(d.test.p_value));
  const double n3_f = audit.complexity.at(Group::kFemale).values.at("n3");
  const double n3_m = audit.complexity.at(Group::kMale).values.at("n3");
  c.Expect(n3_m > n3_f, "N3 female " + Fmt(n3_f) + " male " + Fmt(n3_m));
  const double area_f = audit.sc.groups.at(Group::kFemale).cdf_area;
  const double area_m = audit.sc.groups.at(Group::kMale).cdf_area;
  const auto& ks = audit.sc.disparities.at(0).ks;
  c.Expect(area_m > area_f && ks.p_value < 0.01,
           "SC area female " + Fmt(area_f) + " male " + Fmt(area_m) + " KS p " +
               Fmt(ks.p_value));
}

void Criterion7(Check& c) {
  auto curve = [](Group g, const std::function<double(double)>& f) {
    curves::LearningCurve lc;
    lc.dataset_id = "synthetic";
    lc.group = g;
    for (std::size_t i = 1; i <= 10; ++i) {
      lc.points.push_back({i * 100, f(static_cast<double>(i * 100)), 0.0, 5});
    }
    return lc;
  };
  const auto superior = curve(Group::kYoung, [](double n) { return std::min(0.8, 0.5 + 1e-3 * n); });
  const auto sloped = curve(Group::kOld, [](double n) { return 0.70 + 1e-4 * (n - 1000.0); });
  const auto r = curves::EstimateNAdd(superior, sloped, 500);
  c.Expect(r.n_add && std::llabs(static_cast<long long>(*r.n_add) - 1000) <= 1,
           "sloped n_add " + (r.n_add ? std::to_string(*r.n_add) : std::string("inf")));
  const auto flat = curve(Group::kOld, [](double) { return 0.70; });
  c.Expect(curves::EstimateNAdd(superior, flat, 500).infinite(), "flat curve not infinite");
  const auto falling = curve(Group::kOld, [](double n) { return 0.72 - 1e-5 * n; });
  c.Expect(curves::EstimateNAdd(superior, falling, 500).infinite(), "falling curve not infinite");
  const auto better = curve(Group::kOld, [](double n) { return 0.75 + 1e-4 * n; });
  const auto parity = curves::EstimateNAdd(superior, better, 500);
  c.Expect(parity.n_add && *parity.n_add == 0, "inferior >= superior not zero");
}

int RunCli(const std::string& args, const std::string& threads) {
  const std::string command =
      "EQUISCOPE_THREADS=" + threads + " " + EQUISCOPE_CLI + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const Json* FindByAttribute(const Json& list, const std::string& attribute) {
  for (const Json& entry : list) {
    if (entry.at("attribute") == attribute) return &entry;
  }
  return nullptr;
}

struct PimaRuns {
  fs::path first;
  fs::path second;
  double first_seconds = 0.0;
  bool ok = false;
};

PimaRuns RunPima(const fs::path& root) {
  PimaRuns runs;
  const std::string manifest = std::string(EQUISCOPE_DATA_DIR) + "/pima/pima.json";
  runs.first = root / "threads1";
  runs.second = root / "threads3";
  const auto start = Clock::now();
  const int a = RunCli("report " + manifest + " --out " + runs.first.string(), "1");
  runs.first_seconds = Seconds(start);
  const int b = RunCli("report " + manifest + " --out " + runs.second.string(), "3");
  runs.ok = a == 0 && b == 0;
  return runs;
}

void Criterion8(Check& c, const PimaRuns& runs) {
  if (!runs.ok) {
    c.Expect(false, "audit run failed");
    return;
  }
  c.Expect(runs.first_seconds < 600.0, "runtime " + Fmt(runs.first_seconds) + " s");
  const Json report =
      Json::parse(::equiscope::testing::ReadFile(runs.first / "aware" / "report.json"));
  const Json& d = report.at("datasets").at(0);

  const Json& groups = d.at("auc").at("groups");
  const double young = groups.at("young").at("mean").get<double>();
  const double old = groups.at("old").at("mean").get<double>();
  const Json* age = FindByAttribute(d.at("auc").at("disparities"), "age");
  const double p = age && age->contains("p_value") ? age->at("p_value").get<double>() : 1.0;
  c.Expect(young >= 0.64 && young <= 0.74, "young AUC " + Fmt(young));
  c.Expect(old >= 0.60 && old <= 0.70, "old AUC " + Fmt(old));
  c.Expect(young > old && p < 0.01, "young vs old p " + Fmt(p));

  const Json& sc = d.at("self_consistency");
  const double area_young = sc.at("groups").at("young").at("cdf_area").get<double>();
  const double area_old = sc.at("groups").at("old").at("cdf_area").get<double>();
  const Json* sc_age = FindByAttribute(sc.at("disparities"), "age");
  const double ks = sc_age && sc_age->contains("ks_statistic")
                        ? sc_age->at("ks_statistic").get<double>()
                        : 0.0;
  const double ks_p =
      sc_age && sc_age->contains("p_value") ? sc_age->at("p_value").get<double>() : 1.0;
  c.Expect(area_old > area_young,
           "SC area old " + Fmt(area_old) + " young " + Fmt(area_young));
  c.Expect(ks_p < 0.01, "KS p " + Fmt(ks_p));
  c.Expect(std::abs(ks - 0.205) <= 0.10, "KS statistic " + Fmt(ks));

  const Json& summary = d.at("summary").at("groups");
  const auto young_range = summary.at("young").at("age_range");
  const auto old_range = summary.at("old").at("age_range");
  c.Expect(young_range == Json::array({21.0, 23.0}),
           "young age range " + young_range.dump());
  c.Expect(old_range == Json::array({33.0, 81.0}), "old age range " + old_range.dump());
}

void Criterion9(Check& c, const PimaRuns& runs) {
  if (!runs.ok) {
    c.Expect(false, "audit run failed");
    return;
  }
  for (const char* mode : {"aware", "unaware"}) {
    const std::string a = ::equiscope::testing::ReadFile(runs.first / mode / "report.json");
    const std::string b = ::equiscope::testing::ReadFile(runs.second / mode / "report.json");
    c.Expect(!a.empty() && a == b, std::string(mode) + " report.json differs");
  }
}

void Criterion10(Check& c) {
  using ::equiscope::testing::MakeMatrix;
  const double f1 = complexity::F1MaxFisher(MakeMatrix(4, 1, {-1, 1, 1, 3}),
                                            std::vector<int>{0, 0, 1, 1});
  c.Expect(f1 == 1.0 / 3.0, "F1 " + Fmt(f1, 17));
  const double n3 = complexity::N3NearestNeighborError(
      MakeMatrix(4, 2, {0, 0, 1, 1, 0, 1, 1, 0}), std::vector<int>{1, 1, 0, 0});
  c.Expect(n3 == 1.0, "N3 " + Fmt(n3, 17));
  std::vector<int> y(100, 0);
  std::fill(y.begin(), y.begin() + 10, 1);
  const double ir = complexity::ImbalanceRatio(y);
  c.Expect(ir == 9.0, "IR " + Fmt(ir, 17));
}

}  // namespace
}  // namespace equiscope

int main() {
  using namespace equiscope;
  ::equiscope::testing::TempDir scratch("acceptance");
  PimaRuns pima;
  bool pima_started = false;
  auto pima_runs = [&]() -> const PimaRuns& {
    if (!pima_started) {
      pima = RunPima(scratch.path());
      pima_started = true;
    }
    return pima;
  };

  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"1 AUC oracle equivalence", Criterion1},
      {"2 SC estimator exactness", Criterion2},
      {"3 KS oracle equivalence", Criterion3},
      {"4 learner sanity", Criterion4},
      {"5 protocol counts", Criterion5},
      {"6 directional disparity detection", Criterion6},
      {"7 N_add closed form", Criterion7},
      {"8 Pima soft reproduction", [&](Check& c) { Criterion8(c, pima_runs()); }},
      {"9 determinism across thread counts", [&](Check& c) { Criterion9(c, pima_runs()); }},
      {"10 complexity hand values", Criterion10},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check check;
    try {
      fn(check);
    } catch (const std::exception& e) {
      check.Expect(false, std::string("exception: ") + e.what());
    }
    if (check.ok()) {
      std::cout << "PASS " << name << "\n";
    } else {
      std::cout << "FAIL " << name << ": " << check.Failures() << "\n";
      ++failed;
    }
    std::cout.flush();
  }
  return failed == 0 ? 0 : 1;
}
