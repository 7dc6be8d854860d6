#include <catch2/catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include "lfdbench/decision_tree.hpp"
#include "lfdbench/grid_world.hpp"

using namespace lfdbench;

namespace {

Dataset labeled_cells(const std::vector<std::pair<GridCell, int>>& rows) {
  Dataset d;
  for (const auto& [cell, action] : rows) d.append(State(cell), DiscreteAction{action}, {0, 0});
  return d;
}

double training_error(const TreePolicy& p, const Dataset& d) {
  double wrong = 0.0;
  for (const auto& item : d.items)
    wrong += as_discrete(p(item.state), "t").index != as_discrete(item.label, "t").index;
  return wrong / static_cast<double>(d.size());
}

}  // namespace

TEST_CASE("an arbitrary labeling of distinct cells is memorized") {
  RandomSource rng(8);
  std::vector<std::pair<GridCell, int>> rows;
  for (int col = 0; col < 8; ++col)
    for (int row = 0; row < 8; ++row)
      rows.push_back({{col, row}, static_cast<int>(rng.uniform_int(5))});
  const Dataset d = labeled_cells(rows);
  const DecisionTreeLearner learner{5, 100};
  const TreePolicy p = learner.fit(d);
  REQUIRE(training_error(p, d) == 0.0);
  REQUIRE(p.depth() <= 100);
}

TEST_CASE("the checkerboard that defeats the linear scorer is trivial here") {
  std::vector<std::pair<GridCell, int>> rows = {
      {{0, 0}, kLeft}, {{1, 1}, kLeft}, {{0, 1}, kRight}, {{1, 0}, kRight}};
  const Dataset d = labeled_cells(rows);
  const TreePolicy p = DecisionTreeLearner{5, 100}.fit(d);
  REQUIRE(training_error(p, d) == 0.0);
}

TEST_CASE("identical states fall to a majority leaf with ties at the lowest action") {
  Dataset d;
  d.append(State(GridCell{2, 2}), DiscreteAction{kRight}, {0, 0});
  d.append(State(GridCell{2, 2}), DiscreteAction{kLeft}, {0, 0});
  const TreePolicy p = DecisionTreeLearner{5, 100}.fit(d);
  REQUIRE(as_discrete(p(State(GridCell{2, 2})), "t").index == kLeft);

  Dataset majority;
  majority.append(State(GridCell{1, 1}), DiscreteAction{kStay}, {0, 0});
  majority.append(State(GridCell{1, 1}), DiscreteAction{kStay}, {0, 0});
  majority.append(State(GridCell{1, 1}), DiscreteAction{kForward}, {0, 0});
  const TreePolicy q = DecisionTreeLearner{5, 100}.fit(majority);
  REQUIRE(as_discrete(q(State(GridCell{1, 1})), "t").index == kStay);
}

TEST_CASE("a zero depth cap forces a single majority leaf") {
  std::vector<std::pair<GridCell, int>> rows = {
      {{0, 0}, kForward}, {{1, 0}, kForward}, {{2, 0}, kBackward}};
  const Dataset d = labeled_cells(rows);
  const TreePolicy p = DecisionTreeLearner{5, 0}.fit(d);
  REQUIRE(p.depth() == 0);
  for (const auto& [cell, action] : rows)
    REQUIRE(as_discrete(p(State(cell)), "t").index == kForward);
}

TEST_CASE("fitting is deterministic") {
  RandomSource rng(12);
  std::vector<std::pair<GridCell, int>> rows;
  for (int i = 0; i < 40; ++i)
    rows.push_back({{static_cast<int>(rng.uniform_int(9)), static_cast<int>(rng.uniform_int(9))},
                    static_cast<int>(rng.uniform_int(5))});
  const Dataset d = labeled_cells(rows);
  const nlohmann::json a = DecisionTreeLearner{5, 100}.fit(d);
  const nlohmann::json b = DecisionTreeLearner{5, 100}.fit(d);
  REQUIRE(a.dump() == b.dump());
}

TEST_CASE("tree JSON round trip predicts identically") {
  RandomSource rng(13);
  std::vector<std::pair<GridCell, int>> rows;
  for (int col = 0; col < 6; ++col)
    for (int row = 0; row < 6; ++row)
      rows.push_back({{col, row}, static_cast<int>(rng.uniform_int(4))});
  const Dataset d = labeled_cells(rows);
  const TreePolicy p = DecisionTreeLearner{5, 100}.fit(d);
  const TreePolicy back = tree_policy_from_json(nlohmann::json(p));
  for (int col = 0; col < 6; ++col)
    for (int row = 0; row < 6; ++row) {
      const State s(GridCell{col, row});
      REQUIRE(control_equal(p(s), back(s)));
    }
}

TEST_CASE("tree fitting rejects degenerate inputs") {
  const DecisionTreeLearner learner{5, 100};
  REQUIRE_THROWS_AS(learner.fit(Dataset{}), EmptyDatasetError);
  Dataset continuous;
  continuous.append(State(GridCell{0, 0}), Control(ContinuousControl(0, 0)), {0, 0});
  REQUIRE_THROWS_AS(learner.fit(continuous), VariantMismatchError);
}
