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

// Per-subgroup learning curves and the extra data the weaker subgroup would
// need to match the stronger one.
//
// The weaker curve is extrapolated with three least-squares lines fitted to
// its tail (last 2 points, last 25% and last 50% of the points). Each line
// is solved for the number of additional training rows at which it reaches
// the stronger curve's terminal AUC; the smallest finite answer is reported.

#ifndef EQUISCOPE_LEARNING_CURVES_H_
#define EQUISCOPE_LEARNING_CURVES_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "equiscope/boosted_trees.h"
#include "equiscope/dataset.h"
#include "equiscope/json_io.h"

namespace equiscope::curves {

struct CurvePoint {
  std::size_t n = 0;   // training-set size in rows
  double auc = 0.0;    // mean over repeats of the preset-averaged AUC
  double std = 0.0;    // sample standard deviation over repeats
  std::size_t repeats = 0;
};

struct LearningCurve {
  std::string dataset_id;
  Awareness awareness = Awareness::kAware;
  Group group = Group::kOverall;
  std::vector<CurvePoint> points;  // n strictly increasing

  std::size_t n_terminal() const { return points.back().n; }
  double auc_terminal() const { return points.back().auc; }
};

// Ten geometric steps from 10% to 100% of the training budget.
std::vector<double> DefaultSizeGrid();

struct CurveOptions {
  std::vector<double> sizes = DefaultSizeGrid();  // ascending, in (0, 1]
  int repeats = 5;
  std::vector<trees::Preset> presets = {trees::Preset::kA, trees::Preset::kB,
                                        trees::Preset::kC};
  std::uint64_t seed = 0;
};

struct CurveSet {
  std::map<Group, LearningCurve> curves;
  std::vector<std::string> warnings;
};

// For each size fraction s, `repeats` random training sets of
// floor(s * floor(2 n / 3)) rows are drawn (the remaining rows are the test
// set); every preset is trained on each and subgroup AUCs are averaged.
// Draws whose training labels hold a single class are skipped with a warning.
CurveSet BuildCurves(const TabularDataset& dataset, Awareness awareness,
                     const CurveOptions& options);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n_points = 0;

  double At(double n) const { return slope * n + intercept; }
};

// Ordinary least squares on (n, auc) pairs; needs two distinct n values.
LineFit FitLine(std::span<const CurvePoint> points);

// Additional rows x >= 0 with line(n_terminal + x) = target, or nullopt when
// the line never gets there (non-positive slope below the target).
std::optional<double> SolveAdditional(const LineFit& line, double n_terminal,
                                      double target);

struct ExtrapolationResult {
  Group superior = Group::kOverall;
  Group inferior = Group::kOverall;
  double target_auc = 0.0;
  std::array<LineFit, 3> candidates{};
  std::array<std::optional<double>, 3> candidate_n_add{};
  int chosen = -1;                     // index into candidates, -1 if none
  std::optional<std::uint64_t> n_add;  // nullopt means unbounded
  std::size_t group_size = 0;
  double n_add_ratio = 0.0;  // n_add / group_size; +inf when unbounded

  bool infinite() const { return !n_add.has_value(); }
};

// Picks the smallest finite candidate, rounded up to whole rows.
void ChooseCandidate(ExtrapolationResult& result);

// Needs at least four points per curve and matching dataset metadata.
ExtrapolationResult EstimateNAdd(const LearningCurve& superior,
                                 const LearningCurve& inferior,
                                 std::size_t group_size);

// Orders the pair by terminal AUC and estimates n_add for the weaker one. On
// a tie n_add is 0 with group `b` reported as inferior.
ExtrapolationResult CompareCurves(const LearningCurve& a, const LearningCurve& b,
                                  std::size_t group_size_a, std::size_t group_size_b);

Json ToJson(const LearningCurve& curve);
Json ToJson(const ExtrapolationResult& result);

}  // namespace equiscope::curves

#endif  // EQUISCOPE_LEARNING_CURVES_H_
