#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <nlohmann/json.hpp>
#include <set>

#include "lfdbench/grid_world.hpp"

using namespace lfdbench;

TEST_CASE("construction validates its geometry") {
  REQUIRE_THROWS_AS(GridWorld(0, 3, {0, 0}, {}, 0.1), ConfigError);
  REQUIRE_THROWS_AS(GridWorld(3, 3, {3, 0}, {}, 0.1), ConfigError);   // goal off grid
  REQUIRE_THROWS_AS(GridWorld(3, 3, {0, 0}, {{5, 5}}, 0.1), ConfigError);
  REQUIRE_THROWS_AS(GridWorld(3, 3, {1, 1}, {{1, 1}}, 0.1), ConfigError);  // penalty on goal
  REQUIRE_THROWS_AS(GridWorld(3, 3, {0, 0}, {}, 1.5), ConfigError);
}

TEST_CASE("rewards are plus ten at the goal, minus ten on penalties, zero elsewhere") {
  GridWorld w(4, 4, {3, 3}, {{1, 2}}, 0.0);
  REQUIRE(w.reward(State(GridCell{3, 3})) == 10.0);
  REQUIRE(w.reward(State(GridCell{1, 2})) == -10.0);
  REQUIRE(w.reward(State(GridCell{0, 0})) == 0.0);
}

TEST_CASE("slip-free steps move exactly as commanded") {
  GridWorld w(5, 5, {4, 4}, {}, 0.0);
  RandomSource rng(1);
  const State next = w.step(State(GridCell{2, 2}), DiscreteAction{kForward}, rng);
  REQUIRE(std::get<GridCell>(next) == GridCell{2, 3});
  const State left = w.step(State(GridCell{2, 2}), DiscreteAction{kLeft}, rng);
  REQUIRE(std::get<GridCell>(left) == GridCell{1, 2});
}

TEST_CASE("off-grid outcomes fall back to the current cell") {
  GridWorld w(3, 3, {2, 2}, {}, 0.0);
  RandomSource rng(2);
  const State stay = w.step(State(GridCell{0, 1}), DiscreteAction{kLeft}, rng);
  REQUIRE(std::get<GridCell>(stay) == GridCell{0, 1});
  const State bottom = w.step(State(GridCell{1, 0}), DiscreteAction{kBackward}, rng);
  REQUIRE(std::get<GridCell>(bottom) == GridCell{1, 0});
}

TEST_CASE("slip frequency matches its configured rate") {
  GridWorld w(15, 15, {14, 14}, {}, 0.16);
  RandomSource rng(7);
  const State center(GridCell{7, 7});
  const int n = 150000;
  int moved = 0;
  // Stay is the intent, so any motion at all is a slip that picked one of
  // the four shifted candidates.
  for (int i = 0; i < n; ++i)
    moved += !(std::get<GridCell>(w.step(center, DiscreteAction{kStay}, rng)) == GridCell{7, 7});
  const double rate = double(moved) / n;
  REQUIRE(std::abs(rate - 0.16) < 0.004);
}

TEST_CASE("transition distribution is normalized and matches sampling") {
  GridWorld w(4, 4, {3, 3}, {}, 0.25);
  const auto dist = w.transition(GridCell{0, 0}, kLeft);
  double total = 0.0;
  for (const auto& [idx, p] : dist) total += p;
  REQUIRE(total == Catch::Approx(1.0).epsilon(1e-12));

  // intended Left clamps to (0,0); slips go to the other four candidates,
  // of which Backward also clamps to (0,0)
  double p_stay = 0.0;
  for (const auto& [idx, p] : dist)
    if (w.cell_at(idx) == GridCell{0, 0}) p_stay += p;
  REQUIRE(p_stay == Catch::Approx(0.75 + 0.25 / 2.0).epsilon(1e-12));

  RandomSource rng(9);
  const int n = 100000;
  int stayed = 0;
  for (int i = 0; i < n; ++i)
    stayed += std::get<GridCell>(w.step(State(GridCell{0, 0}), DiscreteAction{kLeft}, rng)) ==
              GridCell{0, 0};
  REQUIRE(std::abs(double(stayed) / n - 0.875) < 0.004);
}

TEST_CASE("generated worlds have the advertised composition") {
  RandomSource rng(5);
  GridWorld w = gridworld_generate(rng, 15, 15, 0.08, 0.16);
  REQUIRE(w.width() == 15);
  REQUIRE(w.height() == 15);
  REQUIRE(w.penalties().size() == 18);  // floor(0.08 * 225)
  std::set<std::pair<int, int>> seen;
  for (const GridCell& c : w.penalties()) {
    REQUIRE(w.contains(c));
    REQUIRE(!(c == w.goal()));
    seen.insert({c.col, c.row});
  }
  REQUIRE(seen.size() == 18);
  REQUIRE(w.free_cells().size() == 225 - 18 - 1);
}

TEST_CASE("generation is deterministic in the stream") {
  RandomSource a(31), b(31);
  GridWorld wa = gridworld_generate(a, 9, 7, 0.1, 0.05);
  GridWorld wb = gridworld_generate(b, 9, 7, 0.1, 0.05);
  REQUIRE(wa.goal() == wb.goal());
  REQUIRE(wa.penalties().size() == wb.penalties().size());
  for (std::size_t i = 0; i < wa.penalties().size(); ++i)
    REQUIRE(wa.penalties()[i] == wb.penalties()[i]);
}

TEST_CASE("grid JSON round trip preserves the world") {
  RandomSource rng(13);
  GridWorld w = gridworld_generate(rng, 8, 6, 0.1, 0.3);
  nlohmann::json j = w;
  GridWorld back = gridworld_from_json(j);
  REQUIRE(back.width() == w.width());
  REQUIRE(back.height() == w.height());
  REQUIRE(back.goal() == w.goal());
  REQUIRE(back.slip_prob() == w.slip_prob());
  REQUIRE(back.penalties().size() == w.penalties().size());
}

TEST_CASE("grid JSON rejects unknown keys") {
  nlohmann::json j{{"width", 3},
                   {"height", 3},
                   {"goal", {2, 2}},
                   {"penalties", nlohmann::json::array()},
                   {"slip_prob", 0.1},
                   {"spin", 1}};
  REQUIRE_THROWS_AS(gridworld_from_json(j), ConfigError);
}
