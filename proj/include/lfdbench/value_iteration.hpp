#pragma once

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <vector>

#include "lfdbench/grid_world.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

// Converged state values for one grid world, indexed like GridWorld cells.
struct ValueFunction {
  std::vector<double> values;
  double gamma = 0.0;
  double residual = 0.0;
  int sweeps = 0;

  double at(const GridWorld& w, const GridCell& c) const { return values[w.index_of(c)]; }
};

// Synchronous value iteration on the exact slip transition model with the
// occupancy reward convention:
//
//   V(s) = R(s) + gamma * max_a sum_{s'} P(s'|s,a) V(s')
//
// Stops when the sup-norm change drops to tol; throws ConvergenceError
// (carrying the last residual) if max_sweeps pass first.
inline ValueFunction value_iteration(const GridWorld& w, double gamma, double tol = 1e-6,
                                     int max_sweeps = 100000, double initial_value = 0.0) {
  if (gamma < 0.0 || gamma >= 1.0) throw ConfigError("value_iteration: gamma must lie in [0, 1)");
  if (tol <= 0.0) throw ConfigError("value_iteration: tol must be positive");
  const int n = w.cell_count();

  // Transition lists are the hot data; build them once.
  std::vector<std::vector<std::pair<std::size_t, double>>> trans(
      static_cast<std::size_t>(n) * kGridActionCount);
  std::vector<double> reward(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const GridCell c = w.cell_at(static_cast<std::size_t>(i));
    reward[i] = w.reward(c);
    for (int a = 0; a < kGridActionCount; ++a)
      trans[static_cast<std::size_t>(i) * kGridActionCount + a] = w.transition(c, a);
  }

  ValueFunction vf;
  vf.gamma = gamma;
  vf.values.assign(static_cast<std::size_t>(n), initial_value);
  std::vector<double> next(static_cast<std::size_t>(n));
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < kGridActionCount; ++a) {
        double ev = 0.0;
        for (const auto& [j, p] : trans[static_cast<std::size_t>(i) * kGridActionCount + a])
          ev += p * vf.values[j];
        if (ev > best) best = ev;
      }
      next[i] = reward[i] + gamma * best;
      residual = std::max(residual, std::abs(next[i] - vf.values[i]));
    }
    vf.values.swap(next);
    vf.sweeps = sweep;
    vf.residual = residual;
    if (residual <= tol) return vf;
  }
  throw ConvergenceError("value_iteration: residual above tol after max_sweeps", vf.residual);
}

// Greedy action under converged values: argmax_a E[V(next)], scanning actions
// in the fixed order so exact ties resolve to the earlier action.
inline int vi_greedy_action(const GridWorld& w, const ValueFunction& vf, const GridCell& c) {
  int best_action = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < kGridActionCount; ++a) {
    double ev = 0.0;
    for (const auto& [j, p] : w.transition(c, a)) ev += p * vf.values[j];
    if (ev > best) {
      best = ev;
      best_action = a;
    }
  }
  return best_action;
}

// Deterministic grid supervisor: the greedy policy of converged value
// iteration, precomputed into a per-cell action table.
class GridViSupervisor {
 public:
  GridViSupervisor(const GridWorld& w, double gamma, double tol = 1e-6)
      : world_(&w), vf_(value_iteration(w, gamma, tol)) {
    actions_.resize(static_cast<std::size_t>(w.cell_count()));
    for (int i = 0; i < w.cell_count(); ++i)
      actions_[i] = vi_greedy_action(w, vf_, w.cell_at(static_cast<std::size_t>(i)));
  }

  const ValueFunction& value_function() const { return vf_; }

  Control operator()(const State& s) const {
    const GridCell& c = get_checked<GridCell>(s, "GridViSupervisor");
    return DiscreteAction{actions_[world_->index_of(c)]};
  }

 private:
  const GridWorld* world_;
  ValueFunction vf_;
  std::vector<int> actions_;
};

inline void to_json(nlohmann::json& j, const ValueFunction& vf) {
  j = nlohmann::json{{"gamma", vf.gamma},
                     {"residual", vf.residual},
                     {"sweeps", vf.sweeps},
                     {"values", vf.values}};
}

}  // namespace lfdbench
