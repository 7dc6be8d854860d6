#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <nlohmann/json.hpp>
#include <vector>

#include "lfdbench/rng.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

// Axis-aligned binary tree over (col, row); value <= threshold goes left.
class TreePolicy {
 public:
  struct Node {
    bool leaf = true;
    int action = 0;
    int feature = 0;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
  };

  explicit TreePolicy(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<Node>& nodes() const { return nodes_; }

  int depth() const { return depth_below(0); }

  Control operator()(const State& s) const {
    const GridCell& c = get_checked<GridCell>(s, "TreePolicy");
    const double xy[2] = {static_cast<double>(c.col), static_cast<double>(c.row)};
    int i = 0;
    while (!nodes_[i].leaf) i = xy[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
    return DiscreteAction{nodes_[i].action};
  }

 private:
  int depth_below(int i) const {
    if (nodes_[i].leaf) return 0;
    return 1 + std::max(depth_below(nodes_[i].left), depth_below(nodes_[i].right));
  }

  std::vector<Node> nodes_;
};

// CART with the Gini criterion and midpoint thresholds between consecutive
// distinct feature values. A node becomes a leaf when it is pure, when the
// depth cap is reached, or when no split is available (all states in the node
// identical); impure nodes otherwise take the best split even at zero Gini
// gain, which is what lets consistent datasets reach zero training error.
// Leaves predict the majority label, ties toward the lower action index.
struct DecisionTreeLearner {
  int n_actions = 5;
  int max_depth = 100;

  TreePolicy fit(const Dataset& data, RandomSource& = dummy_rng()) const {
    if (data.empty()) throw EmptyDatasetError("decision tree: empty dataset");
    std::vector<std::array<double, 2>> pts;
    std::vector<int> labels;
    pts.reserve(data.size());
    for (const auto& item : data.items) {
      const GridCell& c = get_checked<GridCell>(item.state, "decision tree");
      const DiscreteAction& a = as_discrete(item.label, "decision tree");
      if (a.index < 0 || a.index >= n_actions)
        throw ConfigError("decision tree: label outside the action set");
      pts.push_back({static_cast<double>(c.col), static_cast<double>(c.row)});
      labels.push_back(a.index);
    }
    std::vector<TreePolicy::Node> nodes;
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    build(nodes, pts, labels, idx, 0);
    return TreePolicy(std::move(nodes));
  }

 private:
  static RandomSource& dummy_rng() {
    static RandomSource r(0);
    return r;
  }

  int majority(const std::vector<int>& labels, const std::vector<std::size_t>& idx) const {
    std::vector<int> count(static_cast<std::size_t>(n_actions), 0);
    for (const std::size_t i : idx) ++count[labels[i]];
    int best = 0;
    for (int a = 1; a < n_actions; ++a)
      if (count[a] > count[best]) best = a;
    return best;
  }

  double gini(const std::vector<int>& count, double n) const {
    if (n <= 0.0) return 0.0;
    double sum_sq = 0.0;
    for (const int c : count) sum_sq += static_cast<double>(c) * c;
    return 1.0 - sum_sq / (n * n);
  }

  int build(std::vector<TreePolicy::Node>& nodes, const std::vector<std::array<double, 2>>& pts,
            const std::vector<int>& labels, const std::vector<std::size_t>& idx, int depth) const {
    const int me = static_cast<int>(nodes.size());
    nodes.emplace_back();

    std::vector<int> count(static_cast<std::size_t>(n_actions), 0);
    for (const std::size_t i : idx) ++count[labels[i]];
    const bool pure = std::count_if(count.begin(), count.end(), [](int c) { return c > 0; }) <= 1;

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_impurity = std::numeric_limits<double>::infinity();
    if (!pure && depth < max_depth) {
      for (int f = 0; f < 2; ++f) {
        std::vector<std::pair<double, int>> vals;
        vals.reserve(idx.size());
        for (const std::size_t i : idx) vals.emplace_back(pts[i][f], labels[i]);
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<int> left_count(static_cast<std::size_t>(n_actions), 0);
        std::vector<int> right_count = count;
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
          ++left_count[vals[k].second];
          --right_count[vals[k].second];
          if (vals[k].first == vals[k + 1].first) continue;
          const double threshold = vals[k].first + 0.5 * (vals[k + 1].first - vals[k].first);
          const double nl = static_cast<double>(k + 1);
          const double nr = static_cast<double>(vals.size() - k - 1);
          const double impurity =
              (nl * gini(left_count, nl) + nr * gini(right_count, nr)) / static_cast<double>(vals.size());
          if (impurity < best_impurity) {
            best_impurity = impurity;
            best_feature = f;
            best_threshold = threshold;
          }
        }
      }
    }

    if (best_feature < 0) {
      nodes[me].leaf = true;
      nodes[me].action = majority(labels, idx);
      return me;
    }

    std::vector<std::size_t> left_idx, right_idx;
    for (const std::size_t i : idx)
      (pts[i][best_feature] <= best_threshold ? left_idx : right_idx).push_back(i);
    nodes[me].leaf = false;
    nodes[me].feature = best_feature;
    nodes[me].threshold = best_threshold;
    const int l = build(nodes, pts, labels, left_idx, depth + 1);
    const int r = build(nodes, pts, labels, right_idx, depth + 1);
    nodes[me].left = l;
    nodes[me].right = r;
    return me;
  }
};

inline void to_json(nlohmann::json& j, const TreePolicy& p) {
  nlohmann::json ns = nlohmann::json::array();
  for (const auto& n : p.nodes())
    ns.push_back(n.leaf ? nlohmann::json{{"action", n.action}}
                        : nlohmann::json{{"feature", n.feature},
                                         {"threshold", n.threshold},
                                         {"left", n.left},
                                         {"right", n.right}});
  j = nlohmann::json{{"type", "decision_tree"}, {"nodes", ns}};
}

inline TreePolicy tree_policy_from_json(const nlohmann::json& j) {
  std::vector<TreePolicy::Node> nodes;
  for (const auto& n : j.at("nodes")) {
    TreePolicy::Node node;
    if (n.contains("action")) {
      node.leaf = true;
      node.action = n.at("action").get<int>();
    } else {
      node.leaf = false;
      node.feature = n.at("feature").get<int>();
      node.threshold = n.at("threshold").get<double>();
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
    }
    nodes.push_back(node);
  }
  if (nodes.empty()) throw ConfigError("decision tree JSON: no nodes");
  return TreePolicy(std::move(nodes));
}

}  // namespace lfdbench
