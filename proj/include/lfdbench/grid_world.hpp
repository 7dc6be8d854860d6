#pragma once

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <vector>

#include "lfdbench/rng.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

// Fixed action order; ties everywhere break toward the earlier action.
enum GridAction : int {
  kLeft = 0,      // col - 1
  kRight = 1,     // col + 1
  kForward = 2,   // row + 1
  kBackward = 3,  // row - 1
  kStay = 4,
};
inline constexpr int kGridActionCount = 5;

inline constexpr int kGridActionDelta[kGridActionCount][2] = {
    {-1, 0}, {1, 0}, {0, 1}, {0, -1}, {0, 0}};

// Bounded grid with one absorbing-free goal, penalty cells, and slip noise.
// Rewards are per timestep occupied: +10 on the goal, -10 on a penalty,
// 0 elsewhere; nothing is absorbing.
class GridWorld {
 public:
  GridWorld(int width, int height, GridCell goal, std::vector<GridCell> penalties,
            double slip_prob)
      : width_(width), height_(height), goal_(goal), penalties_(std::move(penalties)),
        slip_prob_(slip_prob) {
    if (width_ < 1 || height_ < 1) throw ConfigError("GridWorld: dimensions must be positive");
    if (slip_prob_ < 0.0 || slip_prob_ > 1.0)
      throw ConfigError("GridWorld: slip_prob must lie in [0, 1]");
    if (!contains(goal_)) throw ConfigError("GridWorld: goal out of bounds");
    cell_kind_.assign(static_cast<std::size_t>(width_) * height_, 0);
    for (const GridCell& p : penalties_) {
      if (!contains(p)) throw ConfigError("GridWorld: penalty cell out of bounds");
      cell_kind_[index_of(p)] = -1;
    }
    if (cell_kind_[index_of(goal_)] != 0)
      throw ConfigError("GridWorld: goal collides with a penalty cell");
    cell_kind_[index_of(goal_)] = 1;
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c)
        if (cell_kind_[index_of({c, r})] == 0) free_cells_.push_back({c, r});
    if (free_cells_.empty())
      throw ConfigError("GridWorld: no free cell left to start from");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  const GridCell& goal() const { return goal_; }
  const std::vector<GridCell>& penalties() const { return penalties_; }
  double slip_prob() const { return slip_prob_; }
  const std::vector<GridCell>& free_cells() const { return free_cells_; }
  int cell_count() const { return width_ * height_; }

  bool contains(const GridCell& c) const {
    return c.col >= 0 && c.col < width_ && c.row >= 0 && c.row < height_;
  }

  std::size_t index_of(const GridCell& c) const {
    return static_cast<std::size_t>(c.row) * width_ + c.col;
  }

  GridCell cell_at(std::size_t index) const {
    return {static_cast<int>(index % width_), static_cast<int>(index / width_)};
  }

  double reward(const GridCell& c) const {
    const int kind = cell_kind_[index_of(c)];
    return kind == 1 ? 10.0 : (kind == -1 ? -10.0 : 0.0);
  }

  double reward(const State& s) const { return reward(get_checked<GridCell>(s, "GridWorld::reward")); }

  // Uniform over cells that are neither the goal nor a penalty.
  State sample_initial(RandomSource& rng) const {
    return free_cells_[rng.uniform_int(static_cast<std::uint32_t>(free_cells_.size()))];
  }

  // Intended move with probability 1 - slip, otherwise uniform over the
  // adjacency set (4-neighborhood plus stay) minus the intended cell. The
  // chosen cell is clamped to the current cell only after the draw, so the
  // output always lies in {current} union its in-bounds 4-neighborhood.
  State step(const State& s, const Control& u, RandomSource& rng) const {
    const GridCell& cur = get_checked<GridCell>(s, "GridWorld::step");
    if (!contains(cur)) throw ConfigError("GridWorld::step: state out of bounds");
    const DiscreteAction& a = as_discrete(u, "GridWorld::step");
    if (a.index < 0 || a.index >= kGridActionCount)
      throw ConfigError("GridWorld::step: action index out of range");
    const GridCell intended = shifted(cur, a.index);
    GridCell outcome = intended;
    if (slip_prob_ > 0.0 && rng.uniform() < slip_prob_) {
      GridCell slipped[kGridActionCount - 1];
      int n = 0;
      for (int k = 0; k < kGridActionCount; ++k) {
        const GridCell cand = shifted(cur, k);
        if (cand == intended) continue;
        slipped[n++] = cand;
      }
      outcome = slipped[rng.uniform_int(static_cast<std::uint32_t>(n))];
    }
    return contains(outcome) ? outcome : cur;
  }

  // Exact one-step distribution used by planning; merges outcomes that clamp
  // to the same cell. Entries are (cell index, probability).
  std::vector<std::pair<std::size_t, double>> transition(const GridCell& cur, int action) const {
    std::vector<std::pair<std::size_t, double>> out;
    auto add = [&](GridCell raw, double p) {
      const GridCell landed = contains(raw) ? raw : cur;
      const std::size_t idx = index_of(landed);
      for (auto& [i, q] : out)
        if (i == idx) {
          q += p;
          return;
        }
      out.emplace_back(idx, p);
    };
    const GridCell intended = shifted(cur, action);
    add(intended, 1.0 - slip_prob_);
    int n_alt = 0;
    for (int k = 0; k < kGridActionCount; ++k)
      if (!(shifted(cur, k) == intended)) ++n_alt;
    for (int k = 0; k < kGridActionCount; ++k) {
      const GridCell cand = shifted(cur, k);
      if (cand == intended) continue;
      add(cand, slip_prob_ / n_alt);
    }
    return out;
  }

 private:
  static GridCell shifted(const GridCell& c, int action) {
    return {c.col + kGridActionDelta[action][0], c.row + kGridActionDelta[action][1]};
  }

  int width_;
  int height_;
  GridCell goal_;
  std::vector<GridCell> penalties_;
  double slip_prob_;
  std::vector<int> cell_kind_;  // 0 free, 1 goal, -1 penalty
  std::vector<GridCell> free_cells_;
};

// Random world: floor(penalty_frac * cells) distinct penalty cells, then the
// goal uniform over what remains.
inline GridWorld gridworld_generate(RandomSource& rng, int width, int height,
                                    double penalty_frac, double slip_prob) {
  if (width < 1 || height < 1) throw ConfigError("gridworld_generate: dimensions must be positive");
  if (penalty_frac < 0.0 || penalty_frac > 1.0)
    throw ConfigError("gridworld_generate: penalty_frac must lie in [0, 1]");
  const int cells = width * height;
  const int n_penalties = static_cast<int>(std::floor(penalty_frac * cells));
  if (n_penalties >= cells)
    throw ConfigError("gridworld_generate: no cell left for the goal");
  std::vector<std::size_t> order(static_cast<std::size_t>(cells));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Partial Fisher-Yates: the first n_penalties + 1 slots are a uniform draw
  // without replacement.
  for (int i = 0; i <= n_penalties; ++i) {
    const auto j = i + rng.uniform_int(static_cast<std::uint32_t>(cells - i));
    std::swap(order[i], order[j]);
  }
  GridWorld probe(width, height, {0, 0}, {}, slip_prob);  // for cell_at only
  std::vector<GridCell> penalties;
  penalties.reserve(n_penalties);
  for (int i = 0; i < n_penalties; ++i) penalties.push_back(probe.cell_at(order[i]));
  const GridCell goal = probe.cell_at(order[n_penalties]);
  return GridWorld(width, height, goal, std::move(penalties), slip_prob);
}

inline void to_json(nlohmann::json& j, const GridWorld& w) {
  nlohmann::json pens = nlohmann::json::array();
  for (const GridCell& p : w.penalties()) pens.push_back({p.col, p.row});
  j = nlohmann::json{{"width", w.width()},
                     {"height", w.height()},
                     {"goal", {w.goal().col, w.goal().row}},
                     {"penalties", pens},
                     {"slip_prob", w.slip_prob()}};
}

inline GridWorld gridworld_from_json(const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "width" && key != "height" && key != "goal" && key != "penalties" &&
        key != "slip_prob")
      throw ConfigError("grid world JSON: unknown key '" + key + "'");
  }
  try {
    const GridCell goal{j.at("goal").at(0).get<int>(), j.at("goal").at(1).get<int>()};
    std::vector<GridCell> penalties;
    for (const auto& p : j.at("penalties"))
      penalties.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    return GridWorld(j.at("width").get<int>(), j.at("height").get<int>(), goal,
                     std::move(penalties), j.at("slip_prob").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid world JSON: ") + e.what());
  }
}

}  // namespace lfdbench
