#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <vector>

#include "lfdbench/rng.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

// Feature map for grid cells: coordinates scaled to [0, 1] plus a bias term.
// Deliberately low capacity; the point of this policy class is that it cannot
// represent arbitrary cell-wise action tables.
inline Eigen::Vector3d grid_features(const GridCell& c, int width, int height) {
  return {width > 1 ? static_cast<double>(c.col) / (width - 1) : 0.0,
          height > 1 ? static_cast<double>(c.row) / (height - 1) : 0.0, 1.0};
}

// One-vs-rest linear scorer over grid features; predicts the argmax row,
// breaking exact ties toward the lower action index.
class LinearPolicy {
 public:
  LinearPolicy(Eigen::MatrixXd weights, int width, int height)
      : weights_(std::move(weights)), width_(width), height_(height) {}

  const Eigen::MatrixXd& weights() const { return weights_; }
  int width() const { return width_; }
  int height() const { return height_; }

  Control operator()(const State& s) const {
    const GridCell& c = get_checked<GridCell>(s, "LinearPolicy");
    const Eigen::VectorXd scores = weights_ * grid_features(c, width_, height_);
    int best = 0;
    for (Eigen::Index a = 1; a < scores.size(); ++a)
      if (scores(a) > scores(best)) best = static_cast<int>(a);
    return DiscreteAction{best};
  }

 private:
  Eigen::MatrixXd weights_;  // n_actions x 3
  int width_;
  int height_;
};

// L2-regularized one-vs-rest hinge (linear SVM) trained by stochastic
// subgradient descent with step 0.1/sqrt(t) and a Polyak-averaged iterate as
// the deployed weights.
struct LinearClassifierLearner {
  int n_actions = 5;
  int width = 0;
  int height = 0;
  double lambda = 1e-3;
  int epochs = 50;
  double step0 = 0.1;

  // Objective on a fixed weight matrix: mean summed hinge plus the ridge term.
  double objective(const Eigen::MatrixXd& W, const std::vector<Eigen::Vector3d>& feats,
                   const std::vector<int>& labels) const {
    double hinge = 0.0;
    for (std::size_t i = 0; i < feats.size(); ++i) {
      const Eigen::VectorXd scores = W * feats[i];
      for (int a = 0; a < n_actions; ++a) {
        const double y = labels[i] == a ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - y * scores(a));
      }
    }
    return hinge / static_cast<double>(feats.size()) + 0.5 * lambda * W.squaredNorm();
  }

  LinearPolicy fit(const Dataset& data, RandomSource& rng,
                   std::vector<double>* epoch_objectives = nullptr) const {
    if (data.empty()) throw EmptyDatasetError("linear classifier: empty dataset");
    if (width < 1 || height < 1) throw ConfigError("linear classifier: grid dimensions unset");
    std::vector<Eigen::Vector3d> feats;
    std::vector<int> labels;
    feats.reserve(data.size());
    labels.reserve(data.size());
    for (const auto& item : data.items) {
      const GridCell& c = get_checked<GridCell>(item.state, "linear classifier");
      const DiscreteAction& a = as_discrete(item.label, "linear classifier");
      if (a.index < 0 || a.index >= n_actions)
        throw ConfigError("linear classifier: label outside the action set");
      feats.push_back(grid_features(c, width, height));
      labels.push_back(a.index);
    }

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n_actions, 3);
    Eigen::MatrixXd W_sum = Eigen::MatrixXd::Zero(n_actions, 3);
    std::vector<std::size_t> order(feats.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
      // Fisher-Yates reshuffle each epoch.
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_int(static_cast<std::uint32_t>(i))]);
      for (const std::size_t i : order) {
        ++t;
        const double eta = step0 / std::sqrt(static_cast<double>(t));
        const Eigen::Vector3d& phi = feats[i];
        const Eigen::VectorXd scores = W * phi;
        for (int a = 0; a < n_actions; ++a) {
          const double y = labels[i] == a ? 1.0 : -1.0;
          W.row(a) *= 1.0 - eta * lambda;
          if (y * scores(a) < 1.0) W.row(a) += eta * y * phi.transpose();
        }
        W_sum += W;
      }
      if (epoch_objectives)
        epoch_objectives->push_back(objective(W_sum / static_cast<double>(t), feats, labels));
    }
    return LinearPolicy(W_sum / static_cast<double>(t), width, height);
  }
};

inline void to_json(nlohmann::json& j, const LinearPolicy& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < p.weights().rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < p.weights().cols(); ++c) row.push_back(p.weights()(r, c));
    rows.push_back(row);
  }
  j = nlohmann::json{
      {"type", "linear_classifier"}, {"weights", rows}, {"width", p.width()}, {"height", p.height()}};
}

inline LinearPolicy linear_policy_from_json(const nlohmann::json& j) {
  const auto& rows = j.at("weights");
  Eigen::MatrixXd W(rows.size(), 3);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < 3; ++c) W(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows.at(r).at(c).get<double>();
  return LinearPolicy(std::move(W), j.at("width").get<int>(), j.at("height").get<int>());
}

}  // namespace lfdbench
