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

#include "equiscope/boosted_trees.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "equiscope/errors.h"

namespace equiscope::trees {
namespace {

constexpr std::uint16_t kMissingBin = std::numeric_limits<std::uint16_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Split {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  int bin = -1;
  bool missing_left = true;

  bool valid() const { return feature >= 0; }
};

struct NodeWork {
  int node = 0;
  int depth = 0;
  std::vector<std::size_t> rows;
  double grad = 0.0;
  double hess = 0.0;
  Split split;
};

// Histogram upper edges for one feature from its non-missing training values.
std::vector<double> ComputeBinEdges(std::vector<double> values, int n_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  std::unique_copy(values.begin(), values.end(), std::back_inserter(distinct));
  std::vector<double> edges;
  if (distinct.size() <= 1) return edges;
  if (distinct.size() <= static_cast<std::size_t>(n_bins)) {
    for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
      double mid = distinct[k] + (distinct[k + 1] - distinct[k]) / 2.0;
      if (mid >= distinct[k + 1]) mid = distinct[k];
      edges.push_back(mid);
    }
    return edges;
  }
  const double max_value = distinct.back();
  for (int k = 1; k < n_bins; ++k) {
    const std::size_t index = values.size() * static_cast<std::size_t>(k) /
                              static_cast<std::size_t>(n_bins);
    const double edge = values[index];
    if (edge >= max_value) break;
    if (edges.empty() || edge > edges.back()) edges.push_back(edge);
  }
  return edges;
}

std::uint16_t BinOf(const std::vector<double>& edges, double x) {
  return static_cast<std::uint16_t>(
      std::lower_bound(edges.begin(), edges.end(), x) - edges.begin());
}

class TreeBuilder {
 public:
  TreeBuilder(const BoostConfig& config, const FeatureMatrix& x,
              const std::vector<std::vector<std::uint16_t>>& bins,
              const std::vector<std::vector<double>>& edges,
              const std::vector<double>& grad, const std::vector<double>& hess)
      : config_(config), x_(x), bins_(bins), edges_(edges), grad_(grad), hess_(hess) {}

  // Grows one tree; row_increment receives the leaf value of every row.
  Tree Build(std::vector<double>& row_increment) {
    Tree tree;
    tree.nodes.emplace_back();
    NodeWork root;
    root.rows.resize(x_.rows);
    std::iota(root.rows.begin(), root.rows.end(), std::size_t{0});
    Accumulate(root);
    root.split = FindBestSplit(root);

    std::vector<NodeWork> open;
    open.push_back(std::move(root));
    std::vector<NodeWork> leaves;

    if (config_.growth == Growth::kDepthWise) {
      // Breadth-first: every node above max_depth with a positive-gain split
      // is expanded.
      std::size_t head = 0;
      while (head < open.size()) {
        NodeWork work = std::move(open[head++]);
        if (work.depth >= config_.max_depth || !work.split.valid()) {
          leaves.push_back(std::move(work));
          continue;
        }
        auto [left, right] = Expand(tree, work);
        open.push_back(std::move(left));
        open.push_back(std::move(right));
      }
    } else {
      // Best-first: expand the leaf with the largest gain (lowest node id on
      // ties) until the leaf budget is spent.
      std::size_t n_leaves = 1;
      while (n_leaves < static_cast<std::size_t>(config_.max_leaves)) {
        std::size_t best = open.size();
        for (std::size_t i = 0; i < open.size(); ++i) {
          if (!open[i].split.valid()) continue;
          if (best == open.size() || open[i].split.gain > open[best].split.gain ||
              (open[i].split.gain == open[best].split.gain &&
               open[i].node < open[best].node)) {
            best = i;
          }
        }
        if (best == open.size()) break;
        NodeWork work = std::move(open[best]);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(best));
        auto [left, right] = Expand(tree, work);
        open.push_back(std::move(left));
        open.push_back(std::move(right));
        ++n_leaves;
      }
      leaves = std::move(open);
    }

    for (const NodeWork& leaf : leaves) {
      const double value = -config_.learning_rate * leaf.grad /
                           (leaf.hess + config_.l2_regularization);
      tree.nodes[static_cast<std::size_t>(leaf.node)].value = value;
      for (const std::size_t r : leaf.rows) row_increment[r] = value;
    }
    return tree;
  }

 private:
  void Accumulate(NodeWork& work) const {
    work.grad = 0.0;
    work.hess = 0.0;
    for (const std::size_t r : work.rows) {
      work.grad += grad_[r];
      work.hess += hess_[r];
    }
  }

  double Score(double g, double h) const {
    return g * g / (h + config_.l2_regularization);
  }

  // Tries both missing directions at one candidate threshold.
  void Consider(const NodeWork& work, int feature, double threshold, int bin,
                double gl, double hl, std::size_t nl, double gm, double hm,
                std::size_t nm, Split& best) const {
    const std::size_t n = work.rows.size();
    const double parent = Score(work.grad, work.hess);
    const auto min_leaf = static_cast<std::size_t>(config_.min_samples_leaf);
    for (const bool missing_left : {true, false}) {
      const double g_left = missing_left ? gl + gm : gl;
      const double h_left = missing_left ? hl + hm : hl;
      const std::size_t n_left = missing_left ? nl + nm : nl;
      const std::size_t n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      const double gain = Score(g_left, h_left) +
                          Score(work.grad - g_left, work.hess - h_left) - parent;
      if (gain > best.gain) {
        best = Split{gain, feature, threshold, bin, missing_left};
      }
      if (nm == 0) break;  // both directions are identical
    }
  }

  Split FindBestSplit(const NodeWork& work) const {
    Split best;
    if (work.rows.size() < 2 * static_cast<std::size_t>(config_.min_samples_leaf)) {
      return best;
    }
    for (std::size_t j = 0; j < x_.cols; ++j) {
      if (config_.n_bins == 0) {
        ExactSplit(work, j, best);
      } else {
        HistogramSplit(work, j, best);
      }
    }
    return best;
  }

  void ExactSplit(const NodeWork& work, std::size_t j, Split& best) const {
    struct Item {
      double x;
      std::size_t row;
    };
    std::vector<Item> items;
    items.reserve(work.rows.size());
    double gm = 0.0, hm = 0.0;
    std::size_t nm = 0;
    for (const std::size_t r : work.rows) {
      if (x_.IsMissing(r, j)) {
        gm += grad_[r];
        hm += hess_[r];
        ++nm;
      } else {
        items.push_back({x_.At(r, j), r});
      }
    }
    if (items.size() < 2) return;
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      return a.x < b.x || (a.x == b.x && a.row < b.row);
    });
    double gl = 0.0, hl = 0.0;
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
      gl += grad_[items[i].row];
      hl += hess_[items[i].row];
      const double lo = items[i].x;
      const double hi = items[i + 1].x;
      if (!(lo < hi)) continue;
      double threshold = lo + (hi - lo) / 2.0;
      if (threshold >= hi) threshold = lo;
      Consider(work, static_cast<int>(j), threshold, -1, gl, hl, i + 1, gm, hm, nm, best);
    }
  }

  void HistogramSplit(const NodeWork& work, std::size_t j, Split& best) const {
    const std::vector<double>& edges = edges_[j];
    if (edges.empty()) return;
    const std::size_t n_bins = edges.size() + 1;
    std::vector<double> g(n_bins, 0.0), h(n_bins, 0.0);
    std::vector<std::size_t> count(n_bins, 0);
    double gm = 0.0, hm = 0.0;
    std::size_t nm = 0;
    const std::vector<std::uint16_t>& column = bins_[j];
    for (const std::size_t r : work.rows) {
      const std::uint16_t b = column[r];
      if (b == kMissingBin) {
        gm += grad_[r];
        hm += hess_[r];
        ++nm;
      } else {
        g[b] += grad_[r];
        h[b] += hess_[r];
        ++count[b];
      }
    }
    const std::size_t present = work.rows.size() - nm;
    double gl = 0.0, hl = 0.0;
    std::size_t nl = 0;
    for (std::size_t t = 0; t + 1 < n_bins; ++t) {
      gl += g[t];
      hl += h[t];
      nl += count[t];
      if (count[t] == 0 || nl == 0 || nl == present) continue;
      Consider(work, static_cast<int>(j), edges[t], static_cast<int>(t), gl, hl, nl, gm,
               hm, nm, best);
    }
  }

  bool GoesLeft(std::size_t r, const Split& split) const {
    const auto j = static_cast<std::size_t>(split.feature);
    if (x_.IsMissing(r, j)) return split.missing_left;
    return x_.At(r, j) <= split.threshold;
  }

  std::pair<NodeWork, NodeWork> Expand(Tree& tree, NodeWork& work) {
    const int left_id = static_cast<int>(tree.nodes.size());
    const int right_id = left_id + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[static_cast<std::size_t>(work.node)];
    node.feature = work.split.feature;
    node.threshold = work.split.threshold;
    node.bin = work.split.bin;
    node.missing_left = work.split.missing_left;
    node.left = left_id;
    node.right = right_id;

    NodeWork left, right;
    left.node = left_id;
    right.node = right_id;
    left.depth = right.depth = work.depth + 1;
    for (const std::size_t r : work.rows) {
      (GoesLeft(r, work.split) ? left.rows : right.rows).push_back(r);
    }
    Accumulate(left);
    Accumulate(right);
    left.split = FindBestSplit(left);
    right.split = FindBestSplit(right);
    return {std::move(left), std::move(right)};
  }

  const BoostConfig& config_;
  const FeatureMatrix& x_;
  const std::vector<std::vector<std::uint16_t>>& bins_;
  const std::vector<std::vector<double>>& edges_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
};

class BoostedTreesClassifier : public Classifier {
 public:
  explicit BoostedTreesClassifier(TreeEnsemble model) : model_(std::move(model)) {}
  std::vector<double> Score(const FeatureMatrix& features) const override {
    return trees::Score(model_, features);
  }

 private:
  TreeEnsemble model_;
};

}  // namespace

std::string_view Name(Preset preset) {
  switch (preset) {
    case Preset::kA: return "A";
    case Preset::kB: return "B";
    case Preset::kC: return "C";
  }
  return "?";
}

Preset ParsePreset(std::string_view name) {
  if (name == "A") return Preset::kA;
  if (name == "B") return Preset::kB;
  if (name == "C") return Preset::kC;
  throw InvalidArgument("unknown preset \"" + std::string(name) + "\"");
}

BoostConfig BoostConfig::ForPreset(Preset preset, std::uint64_t seed) {
  BoostConfig config;
  config.preset = preset;
  config.seed = seed;
  switch (preset) {
    case Preset::kA:
      config.growth = Growth::kDepthWise;
      config.max_depth = 6;
      config.max_leaves = 0;
      config.n_bins = 0;
      break;
    case Preset::kB:
      config.growth = Growth::kLeafWise;
      config.max_depth = 0;
      config.max_leaves = 31;
      config.n_bins = 255;
      break;
    case Preset::kC:
      config.growth = Growth::kDepthWise;
      config.max_depth = 6;
      config.max_leaves = 0;
      config.n_bins = 255;
      break;
  }
  return config;
}

void BoostConfig::Validate() const {
  if (n_trees < 1) throw InvalidArgument("n_trees must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (min_samples_leaf < 1) throw InvalidArgument("min_samples_leaf must be >= 1");
  if (n_bins < 0 || n_bins >= kMissingBin) throw InvalidArgument("n_bins out of range");
  if (n_bins == 1) throw InvalidArgument("n_bins must be 0 (exact) or >= 2");
  if (l2_regularization < 0.0) throw InvalidArgument("l2_regularization must be >= 0");
  const bool depth_bound = max_depth > 0;
  const bool leaf_bound = max_leaves > 0;
  if (growth == Growth::kDepthWise && !(depth_bound && !leaf_bound)) {
    throw InvalidArgument("depth-wise growth needs max_depth > 0 and no leaf bound");
  }
  if (growth == Growth::kLeafWise && !(leaf_bound && !depth_bound)) {
    throw InvalidArgument("leaf-wise growth needs max_leaves > 0 and no depth bound");
  }
  if (growth == Growth::kLeafWise && max_leaves < 2) {
    throw InvalidArgument("leaf-wise growth needs max_leaves >= 2");
  }
}

TreeEnsemble Train(const BoostConfig& config, const FeatureMatrix& features,
                   std::span<const int> labels) {
  config.Validate();
  const std::size_t n = features.rows;
  if (n < 2) throw InvalidArgument("training needs at least two rows");
  if (labels.size() != n) throw InvalidArgument("labels and feature rows differ in count");
  std::size_t n_pos = 0;
  for (const int y : labels) {
    if (y != 0 && y != 1) throw InvalidArgument("labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(y);
  }
  for (std::size_t i = 0; i < features.values.size(); ++i) {
    if (!features.missing[i] && !std::isfinite(features.values[i])) {
      throw InvalidArgument("non-finite feature value at row " +
                            std::to_string(i / features.cols) + ", column " +
                            std::to_string(i % features.cols) + " is not masked");
    }
  }

  TreeEnsemble model;
  model.preset = config.preset;
  model.n_features = features.cols;
  if (n_pos == 0 || n_pos == n) {
    model.base_score = n_pos == 0 ? -kInf : kInf;
    return model;
  }
  const double prior = static_cast<double>(n_pos) / static_cast<double>(n);
  model.base_score = std::log(prior / (1.0 - prior));

  std::vector<std::vector<std::uint16_t>> bins;
  if (config.n_bins > 0) {
    model.bin_edges.resize(features.cols);
    bins.assign(features.cols, std::vector<std::uint16_t>(n, kMissingBin));
    for (std::size_t j = 0; j < features.cols; ++j) {
      std::vector<double> present;
      for (std::size_t r = 0; r < n; ++r) {
        if (!features.IsMissing(r, j)) present.push_back(features.At(r, j));
      }
      model.bin_edges[j] = ComputeBinEdges(std::move(present), config.n_bins);
      for (std::size_t r = 0; r < n; ++r) {
        if (!features.IsMissing(r, j)) bins[j][r] = BinOf(model.bin_edges[j], features.At(r, j));
      }
    }
  } else {
    model.bin_edges.assign(features.cols, {});
  }

  std::vector<double> raw(n, model.base_score);
  std::vector<double> grad(n), hess(n), increment(n);
  for (int t = 0; t < config.n_trees; ++t) {
    for (std::size_t r = 0; r < n; ++r) {
      const double p = Sigmoid(raw[r]);
      grad[r] = p - static_cast<double>(labels[r]);
      hess[r] = p * (1.0 - p);
    }
    TreeBuilder builder(config, features, bins, model.bin_edges, grad, hess);
    model.trees.push_back(builder.Build(increment));
    for (std::size_t r = 0; r < n; ++r) raw[r] += increment[r];
  }
  return model;
}

std::vector<double> Score(const TreeEnsemble& model, const FeatureMatrix& features,
                          std::size_t max_trees) {
  if (features.cols != model.n_features) {
    throw InvalidArgument("model expects " + std::to_string(model.n_features) +
                          " features, got " + std::to_string(features.cols));
  }
  const std::size_t n_trees = std::min(max_trees, model.trees.size());
  std::vector<double> scores(features.rows);
  for (std::size_t r = 0; r < features.rows; ++r) {
    double raw = model.base_score;
    for (std::size_t t = 0; t < n_trees; ++t) {
      const auto& nodes = model.trees[t].nodes;
      std::size_t i = 0;
      while (!nodes[i].IsLeaf()) {
        const TreeNode& node = nodes[i];
        const auto j = static_cast<std::size_t>(node.feature);
        const bool left = features.IsMissing(r, j) ? node.missing_left
                                                   : features.At(r, j) <= node.threshold;
        i = static_cast<std::size_t>(left ? node.left : node.right);
      }
      raw += nodes[i].value;
    }
    scores[r] = Sigmoid(raw);
  }
  return scores;
}

int PredictLabel(double score) { return score >= 0.5 ? 1 : 0; }

std::vector<int> PredictLabels(std::span<const double> scores) {
  std::vector<int> labels(scores.size());
  std::transform(scores.begin(), scores.end(), labels.begin(),
                 [](double s) { return PredictLabel(s); });
  return labels;
}

double LogLoss(std::span<const double> scores, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double p = labels[i] == 1 ? scores[i] : 1.0 - scores[i];
    total -= std::log(std::max(p, 1e-300));
  }
  return total / static_cast<double>(scores.size());
}

Json TreeEnsemble::ToJson() const {
  Json json;
  json["format"] = "equiscope.tree_ensemble";
  json["version"] = kFormatVersion;
  json["preset"] = std::string(Name(preset));
  json["n_features"] = n_features;
  json["base_score"] = EncodeDouble(base_score);
  json["bin_edges"] = bin_edges;
  Json tree_list = Json::array();
  for (const Tree& tree : trees) {
    Json t;
    std::vector<int> feature, bin, left, right;
    std::vector<double> threshold, value;
    std::vector<bool> missing_left;
    for (const TreeNode& node : tree.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      bin.push_back(node.bin);
      missing_left.push_back(node.missing_left);
      left.push_back(node.left);
      right.push_back(node.right);
      value.push_back(node.value);
    }
    t["feature"] = feature;
    t["threshold"] = threshold;
    t["bin"] = bin;
    t["missing_left"] = missing_left;
    t["left"] = left;
    t["right"] = right;
    t["value"] = value;
    tree_list.push_back(std::move(t));
  }
  json["trees"] = std::move(tree_list);
  return json;
}

TreeEnsemble TreeEnsemble::FromJson(const Json& json) {
  try {
    if (json.at("format") != "equiscope.tree_ensemble") {
      throw SchemaError("not a tree ensemble document");
    }
    if (json.at("version").get<int>() != kFormatVersion) {
      throw SchemaError("unsupported tree ensemble version");
    }
    TreeEnsemble model;
    model.preset = ParsePreset(json.at("preset").get<std::string>());
    model.n_features = json.at("n_features").get<std::size_t>();
    model.base_score = ReadDouble(json.at("base_score"));
    model.bin_edges = json.at("bin_edges").get<std::vector<std::vector<double>>>();
    for (const Json& t : json.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<int>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto bin = t.at("bin").get<std::vector<int>>();
      const auto missing_left = t.at("missing_left").get<std::vector<bool>>();
      const auto left = t.at("left").get<std::vector<int>>();
      const auto right = t.at("right").get<std::vector<int>>();
      const auto value = t.at("value").get<std::vector<double>>();
      const std::size_t k = feature.size();
      if (threshold.size() != k || bin.size() != k || missing_left.size() != k ||
          left.size() != k || right.size() != k || value.size() != k || k == 0) {
        throw SchemaError("tree arrays differ in length");
      }
      Tree tree;
      for (std::size_t i = 0; i < k; ++i) {
        TreeNode node{feature[i], threshold[i], bin[i], missing_left[i],
                      left[i],    right[i],     value[i]};
        if (!node.IsLeaf()) {
          const auto in_range = [&](int c) {
            return c > static_cast<int>(i) && c < static_cast<int>(k);
          };
          if (!in_range(node.left) || !in_range(node.right) ||
              node.feature >= static_cast<int>(model.n_features)) {
            throw SchemaError("malformed tree node");
          }
        }
        tree.nodes.push_back(node);
      }
      model.trees.push_back(std::move(tree));
    }
    return model;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed tree ensemble: ") + e.what());
  }
}

BoostedTreesAdapter::BoostedTreesAdapter(Preset preset)
    : config_(BoostConfig::ForPreset(preset)) {}

std::string BoostedTreesAdapter::Id() const { return std::string(Name(config_.preset)); }

std::unique_ptr<Classifier> BoostedTreesAdapter::Train(const FeatureMatrix& features,
                                                       std::span<const int> labels,
                                                       std::uint64_t seed) const {
  BoostConfig config = config_;
  config.seed = seed;
  return std::make_unique<BoostedTreesClassifier>(trees::Train(config, features, labels));
}

}  // namespace equiscope::trees
