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

#include "equiscope/learning_curves.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "equiscope/errors.h"
#include "equiscope/parallel.h"
#include "equiscope/random.h"
#include "equiscope/stats.h"

namespace equiscope::curves {
namespace {

// Result of one (size, repeat, preset) fit: AUC per group, NaN if undefined.
struct DrawResult {
  bool skipped = false;
  std::map<Group, double> auc;
};

std::size_t TailLength(std::size_t k, double fraction) {
  const auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(k)));
  return std::clamp<std::size_t>(n, 2, k);
}

}  // namespace

std::vector<double> DefaultSizeGrid() {
  std::vector<double> sizes;
  for (int k = 0; k < 10; ++k) sizes.push_back(0.1 * std::pow(10.0, k / 9.0));
  sizes.back() = 1.0;
  return sizes;
}

CurveSet BuildCurves(const TabularDataset& dataset, Awareness awareness,
                     const CurveOptions& options) {
  if (options.sizes.empty()) throw InvalidArgument("empty size grid");
  if (options.repeats < 1) throw InvalidArgument("repeats must be >= 1");
  if (options.presets.empty()) throw InvalidArgument("no presets");
  for (std::size_t i = 0; i < options.sizes.size(); ++i) {
    const double s = options.sizes[i];
    if (!(s > 0.0 && s <= 1.0)) throw InvalidArgument("sizes must lie in (0, 1]");
    if (i > 0 && !(s > options.sizes[i - 1])) {
      throw InvalidArgument("sizes must be strictly ascending");
    }
  }
  const std::size_t budget = 2 * dataset.n_rows / 3;
  const FeatureMatrix view = FeatureView(dataset, awareness);
  const std::size_t n_sizes = options.sizes.size();
  const auto n_repeats = static_cast<std::size_t>(options.repeats);
  const std::size_t n_presets = options.presets.size();

  std::vector<DrawResult> draws(n_sizes * n_repeats * n_presets);
  ParallelFor(draws.size(), [&](std::size_t task) {
    const std::size_t size_index = task / (n_repeats * n_presets);
    const std::size_t repeat = (task / n_presets) % n_repeats;
    const trees::Preset preset = options.presets[task % n_presets];
    const auto n_train = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::floor(options.sizes[size_index] *
                                               static_cast<double>(budget))));
    Rng rng(DeriveSeed(options.seed, {TagOf("curve"), size_index, repeat}));
    const std::vector<std::size_t> perm = Permutation(dataset.n_rows, rng);
    std::vector<std::size_t> train(perm.begin(), perm.begin() + n_train);
    std::vector<std::size_t> test(perm.begin() + n_train, perm.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());

    std::vector<int> train_labels;
    for (const std::size_t r : train) train_labels.push_back(dataset.target[r]);
    const auto positives = std::count(train_labels.begin(), train_labels.end(), 1);
    DrawResult& out = draws[task];
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(train_labels.size())) {
      out.skipped = true;
      return;
    }
    trees::BoostConfig config = trees::BoostConfig::ForPreset(
        preset, DeriveSeed(options.seed, {TagOf("curve-fit"), size_index, repeat,
                                          TagOf(trees::Name(preset))}));
    const trees::TreeEnsemble model =
        trees::Train(config, view.SelectRows(train), train_labels);
    const std::vector<double> scores = trees::Score(model, view.SelectRows(test));
    for (const Group group : kAllGroups) {
      std::vector<double> s;
      std::vector<int> y;
      for (std::size_t i = 0; i < test.size(); ++i) {
        if (!dataset.InGroup(test[i], group)) continue;
        s.push_back(scores[i]);
        y.push_back(dataset.target[test[i]]);
      }
      const auto pos = std::count(y.begin(), y.end(), 1);
      if (pos == 0 || pos == static_cast<std::ptrdiff_t>(y.size())) continue;
      out.auc[group] = stats::Auroc(s, y);
    }
  });

  CurveSet set;
  for (const Group group : kAllGroups) {
    LearningCurve curve;
    curve.dataset_id = dataset.dataset_id;
    curve.awareness = awareness;
    curve.group = group;
    set.curves[group] = curve;
  }
  for (std::size_t size_index = 0; size_index < n_sizes; ++size_index) {
    const auto n_train = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::floor(options.sizes[size_index] *
                                               static_cast<double>(budget))));
    for (const Group group : kAllGroups) {
      std::vector<double> per_repeat;
      bool any_skipped = false;
      for (std::size_t repeat = 0; repeat < n_repeats; ++repeat) {
        double sum = 0.0;
        bool defined = true;
        for (std::size_t p = 0; p < n_presets; ++p) {
          const DrawResult& d = draws[(size_index * n_repeats + repeat) * n_presets + p];
          if (d.skipped) {
            any_skipped = true;
            defined = false;
            break;
          }
          const auto it = d.auc.find(group);
          if (it == d.auc.end()) {
            defined = false;
            break;
          }
          sum += it->second;
        }
        if (defined) per_repeat.push_back(sum / static_cast<double>(n_presets));
      }
      if (any_skipped && group == Group::kOverall) {
        set.warnings.push_back("size " + std::to_string(n_train) +
                               ": single-class training draw skipped");
      }
      if (per_repeat.empty()) continue;
      LearningCurve& curve = set.curves[group];
      if (!curve.points.empty() && curve.points.back().n >= n_train) {
        set.warnings.push_back("size " + std::to_string(n_train) +
                               " repeats an earlier training size; point dropped");
        continue;
      }
      curve.points.push_back(CurvePoint{n_train, stats::Mean(per_repeat),
                                        stats::SampleStdDev(per_repeat),
                                        per_repeat.size()});
    }
  }
  for (auto it = set.curves.begin(); it != set.curves.end();) {
    it = it->second.points.empty() ? set.curves.erase(it) : std::next(it);
  }
  return set;
}

LineFit FitLine(std::span<const CurvePoint> points) {
  if (points.size() < 2) throw InvalidArgument("line fit needs two points");
  double mean_n = 0.0, mean_auc = 0.0;
  for (const CurvePoint& p : points) {
    mean_n += static_cast<double>(p.n);
    mean_auc += p.auc;
  }
  mean_n /= static_cast<double>(points.size());
  mean_auc /= static_cast<double>(points.size());
  double sxx = 0.0, sxy = 0.0;
  for (const CurvePoint& p : points) {
    const double dx = static_cast<double>(p.n) - mean_n;
    sxx += dx * dx;
    sxy += dx * (p.auc - mean_auc);
  }
  if (sxx == 0.0) throw InvalidArgument("line fit needs distinct sizes");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_auc - fit.slope * mean_n;
  fit.n_points = points.size();
  return fit;
}

std::optional<double> SolveAdditional(const LineFit& line, double n_terminal,
                                      double target) {
  const double at_terminal = line.At(n_terminal);
  if (at_terminal >= target) return 0.0;
  if (!(line.slope > 0.0)) return std::nullopt;
  return (target - at_terminal) / line.slope;
}

void ChooseCandidate(ExtrapolationResult& result) {
  result.chosen = -1;
  for (int i = 0; i < 3; ++i) {
    const auto& x = result.candidate_n_add[static_cast<std::size_t>(i)];
    if (!x) continue;
    if (result.chosen < 0 ||
        *x < *result.candidate_n_add[static_cast<std::size_t>(result.chosen)]) {
      result.chosen = i;
    }
  }
  if (result.chosen < 0) {
    result.n_add.reset();
    result.n_add_ratio = std::numeric_limits<double>::infinity();
    return;
  }
  const double x = *result.candidate_n_add[static_cast<std::size_t>(result.chosen)];
  // Absorb rounding noise from the line fit before rounding up.
  const double rounded = std::ceil(x - 1e-9 * std::max(1.0, x));
  result.n_add = static_cast<std::uint64_t>(std::max(0.0, rounded));
  result.n_add_ratio = result.group_size == 0
                           ? std::numeric_limits<double>::infinity()
                           : static_cast<double>(*result.n_add) /
                                 static_cast<double>(result.group_size);
}

ExtrapolationResult EstimateNAdd(const LearningCurve& superior,
                                 const LearningCurve& inferior, std::size_t group_size) {
  if (superior.dataset_id != inferior.dataset_id ||
      superior.awareness != inferior.awareness) {
    throw InvalidArgument("learning curves come from different datasets or views");
  }
  if (superior.points.size() < 4 || inferior.points.size() < 4) {
    throw InvalidArgument("n_add estimation needs at least four points per curve");
  }
  ExtrapolationResult result;
  result.superior = superior.group;
  result.inferior = inferior.group;
  result.target_auc = superior.auc_terminal();
  result.group_size = group_size;

  const std::size_t k = inferior.points.size();
  const std::array<std::size_t, 3> tails = {2, TailLength(k, 0.25), TailLength(k, 0.5)};
  const std::span<const CurvePoint> all(inferior.points);
  for (std::size_t i = 0; i < 3; ++i) {
    result.candidates[i] = FitLine(all.subspan(k - tails[i]));
    result.candidate_n_add[i] = SolveAdditional(
        result.candidates[i], static_cast<double>(inferior.n_terminal()), result.target_auc);
  }
  if (inferior.auc_terminal() >= result.target_auc) {
    result.chosen = -1;
    result.n_add = 0;
    result.n_add_ratio = 0.0;
    return result;
  }
  ChooseCandidate(result);
  return result;
}

ExtrapolationResult CompareCurves(const LearningCurve& a, const LearningCurve& b,
                                  std::size_t group_size_a, std::size_t group_size_b) {
  if (a.auc_terminal() > b.auc_terminal()) return EstimateNAdd(a, b, group_size_b);
  if (b.auc_terminal() > a.auc_terminal()) return EstimateNAdd(b, a, group_size_a);
  ExtrapolationResult tie = EstimateNAdd(a, b, group_size_b);
  tie.chosen = -1;
  tie.n_add = 0;
  tie.n_add_ratio = 0.0;
  return tie;
}

Json ToJson(const LearningCurve& curve) {
  Json json;
  json["dataset_id"] = curve.dataset_id;
  json["awareness"] = std::string(Name(curve.awareness));
  json["group"] = std::string(Name(curve.group));
  Json points = Json::array();
  for (const CurvePoint& p : curve.points) {
    points.push_back({{"n", p.n}, {"auc", p.auc}, {"std", p.std}, {"repeats", p.repeats}});
  }
  json["points"] = std::move(points);
  return json;
}

Json ToJson(const ExtrapolationResult& r) {
  Json json;
  json["superior_group"] = std::string(Name(r.superior));
  json["inferior_group"] = std::string(Name(r.inferior));
  json["target_auc"] = r.target_auc;
  Json candidates = Json::array();
  for (std::size_t i = 0; i < 3; ++i) {
    candidates.push_back({{"slope", r.candidates[i].slope},
                          {"intercept", r.candidates[i].intercept},
                          {"n_points", r.candidates[i].n_points},
                          {"n_add", r.candidate_n_add[i] ? Json(*r.candidate_n_add[i])
                                                         : Json("inf")}});
  }
  json["candidates"] = std::move(candidates);
  json["chosen"] = r.chosen;
  json["n_add"] = r.n_add ? Json(*r.n_add) : Json("inf");
  json["group_size"] = r.group_size;
  json["n_add_ratio"] = EncodeDouble(r.n_add_ratio);
  return json;
}

}  // namespace equiscope::curves
