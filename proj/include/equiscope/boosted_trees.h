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

// Gradient-boosted decision trees for binary classification with logistic
// loss and learned missing-value directions.
//
// Three presets stand for three model families:
//   A: depth-wise growth, exact thresholds, max depth 6.
//   B: leaf-wise (best-first) growth, 255 histogram bins, 31 leaves.
//   C: depth-wise growth, 255 histogram bins, max depth 6.
//
// Each split stores the direction taken by missing values. During training
// both directions are tried and the one with the larger gain is kept (left
// on ties); a node without missing training values sends them left.

#ifndef EQUISCOPE_BOOSTED_TREES_H_
#define EQUISCOPE_BOOSTED_TREES_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "equiscope/dataset.h"
#include "equiscope/json_io.h"

namespace equiscope::trees {

enum class Preset { kA, kB, kC };
inline constexpr Preset kAllPresets[] = {Preset::kA, Preset::kB, Preset::kC};

std::string_view Name(Preset preset);
Preset ParsePreset(std::string_view name);

enum class Growth { kDepthWise, kLeafWise };

struct BoostConfig {
  Preset preset = Preset::kA;
  int n_trees = 100;
  double learning_rate = 0.1;
  Growth growth = Growth::kDepthWise;
  int max_depth = 6;       // depth-wise bound; 0 when unused
  int max_leaves = 0;      // leaf-wise bound; 0 when unused
  int n_bins = 0;          // 0 = exact thresholds
  int min_samples_leaf = 20;
  double l2_regularization = 1.0;
  std::uint64_t seed = 0;

  static BoostConfig ForPreset(Preset preset, std::uint64_t seed = 0);
  // Throws InvalidArgument unless exactly one growth bound is active,
  // n_trees >= 1 and learning_rate > 0.
  void Validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // value <= threshold goes left
  int bin = -1;            // histogram bin id of the threshold, -1 if exact
  bool missing_left = true;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf log-odds increment

  bool IsLeaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct TreeEnsemble {
  static constexpr int kFormatVersion = 1;

  Preset preset = Preset::kA;
  std::size_t n_features = 0;
  double base_score = 0.0;  // prior log-odds; +-inf for single-class labels
  std::vector<Tree> trees;
  // Per-feature histogram bin upper edges; empty for exact models.
  std::vector<std::vector<double>> bin_edges;

  Json ToJson() const;
  static TreeEnsemble FromJson(const Json& json);
};

// Fits a boosted logistic-loss ensemble. Throws InvalidArgument for fewer
// than two rows, non-binary labels, or non-finite values outside the mask.
TreeEnsemble Train(const BoostConfig& config, const FeatureMatrix& features,
                   std::span<const int> labels);

// Probability scores sigmoid(base_score + sum of leaf values), using at most
// max_trees trees. Throws InvalidArgument on a column-count mismatch.
std::vector<double> Score(const TreeEnsemble& model, const FeatureMatrix& features,
                          std::size_t max_trees = static_cast<std::size_t>(-1));

// Threshold at 0.5; a score of exactly 0.5 maps to label 1.
int PredictLabel(double score);
std::vector<int> PredictLabels(std::span<const double> scores);

// Mean binary cross-entropy of scores against labels.
double LogLoss(std::span<const double> scores, std::span<const int> labels);

// A trained model of any family.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::vector<double> Score(const FeatureMatrix& features) const = 0;
};

// Training contract used by the evaluation protocol. Implementations must be
// deterministic for a given seed and return one score per row.
class ClassifierAdapter {
 public:
  virtual ~ClassifierAdapter() = default;
  virtual std::string Id() const = 0;
  virtual std::unique_ptr<Classifier> Train(const FeatureMatrix& features,
                                            std::span<const int> labels,
                                            std::uint64_t seed) const = 0;
};

class BoostedTreesAdapter : public ClassifierAdapter {
 public:
  explicit BoostedTreesAdapter(Preset preset);
  explicit BoostedTreesAdapter(BoostConfig config) : config_(config) {}

  std::string Id() const override;
  std::unique_ptr<Classifier> Train(const FeatureMatrix& features,
                                    std::span<const int> labels,
                                    std::uint64_t seed) const override;

 private:
  BoostConfig config_;
};

}  // namespace equiscope::trees

#endif  // EQUISCOPE_BOOSTED_TREES_H_
