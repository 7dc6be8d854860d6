#include <catch2/catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include "lfdbench/grid_world.hpp"
#include "lfdbench/linear_classifier.hpp"

using namespace lfdbench;

namespace {

Dataset labeled_cells(const std::vector<std::pair<GridCell, int>>& rows) {
  Dataset d;
  for (const auto& [cell, action] : rows) d.append(State(cell), DiscreteAction{action}, {0, 0});
  return d;
}

double training_error(const LinearPolicy& p, const Dataset& d) {
  double wrong = 0.0;
  for (const auto& item : d.items)
    wrong += as_discrete(p(item.state), "t").index != as_discrete(item.label, "t").index;
  return wrong / static_cast<double>(d.size());
}

}  // namespace

TEST_CASE("a linearly separable split is learned exactly") {
  std::vector<std::pair<GridCell, int>> rows;
  for (int col = 0; col < 8; ++col)
    for (int row = 0; row < 8; ++row) rows.push_back({{col, row}, col < 4 ? kLeft : kRight});
  const Dataset d = labeled_cells(rows);
  // The averaged iterate needs a long run before it lands on the separating
  // optimum; the default epoch budget leaves a few boundary cells wrong.
  const LinearClassifierLearner learner{5, 8, 8, 1e-3, 1000};
  RandomSource rng(1);
  const LinearPolicy p = learner.fit(d, rng);
  REQUIRE(training_error(p, d) == 0.0);
}

TEST_CASE("a checkerboard labeling cannot be fit by a linear scorer") {
  // The four corners of a 2x2 grid labeled diagonally: no argmax of linear
  // scores separates them, so at least one of the four must be wrong.
  std::vector<std::pair<GridCell, int>> rows;
  for (int rep = 0; rep < 10; ++rep) {
    rows.push_back({{0, 0}, kLeft});
    rows.push_back({{1, 1}, kLeft});
    rows.push_back({{0, 1}, kRight});
    rows.push_back({{1, 0}, kRight});
  }
  const Dataset d = labeled_cells(rows);
  const LinearClassifierLearner learner{5, 2, 2};
  RandomSource rng(2);
  const LinearPolicy p = learner.fit(d, rng);
  REQUIRE(training_error(p, d) >= 0.25 - 1e-12);
}

TEST_CASE("the averaged iterate's objective settles downward") {
  std::vector<std::pair<GridCell, int>> rows;
  for (int col = 0; col < 6; ++col)
    for (int row = 0; row < 6; ++row)
      rows.push_back({{col, row}, (col + 2 * row) % 3 == 0 ? kForward : (col < 3 ? kLeft : kRight)});
  const Dataset d = labeled_cells(rows);
  const LinearClassifierLearner learner{5, 6, 6};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomSource rng(seed);
    std::vector<double> objectives;
    learner.fit(d, rng, &objectives);
    REQUIRE(objectives.size() == 50);
    REQUIRE(objectives.back() <= objectives.front() + 1e-9);
    // the tail is past the noisy early phase: no late rebound
    REQUIRE(objectives.back() <= objectives[24] + 1e-6);
  }
}

TEST_CASE("fitting is deterministic in the stream") {
  std::vector<std::pair<GridCell, int>> rows;
  for (int col = 0; col < 5; ++col)
    for (int row = 0; row < 4; ++row) rows.push_back({{col, row}, (col * row) % 5});
  const Dataset d = labeled_cells(rows);
  const LinearClassifierLearner learner{5, 5, 4};
  RandomSource r1(9), r2(9);
  const nlohmann::json a = learner.fit(d, r1);
  const nlohmann::json b = learner.fit(d, r2);
  REQUIRE(a.dump() == b.dump());
}

TEST_CASE("degenerate inputs raise typed errors") {
  const LinearClassifierLearner learner{5, 4, 4};
  RandomSource rng(3);
  REQUIRE_THROWS_AS(learner.fit(Dataset{}, rng), EmptyDatasetError);

  Dataset continuous;
  continuous.append(State(GridCell{0, 0}), Control(ContinuousControl(0, 0)), {0, 0});
  REQUIRE_THROWS_AS(learner.fit(continuous, rng), VariantMismatchError);

  Dataset out_of_range;
  out_of_range.append(State(GridCell{0, 0}), DiscreteAction{7}, {0, 0});
  REQUIRE_THROWS_AS(learner.fit(out_of_range, rng), ConfigError);
}

TEST_CASE("policy JSON round trip predicts identically") {
  std::vector<std::pair<GridCell, int>> rows;
  for (int col = 0; col < 7; ++col)
    for (int row = 0; row < 7; ++row) rows.push_back({{col, row}, (col + row) % 2 ? kStay : kBackward});
  const Dataset d = labeled_cells(rows);
  const LinearClassifierLearner learner{5, 7, 7};
  RandomSource rng(4);
  const LinearPolicy p = learner.fit(d, rng);
  const LinearPolicy back = linear_policy_from_json(nlohmann::json(p));
  for (int col = 0; col < 7; ++col)
    for (int row = 0; row < 7; ++row) {
      const State s(GridCell{col, row});
      REQUIRE(control_equal(p(s), back(s)));
    }
}
