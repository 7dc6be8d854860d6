#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "lfdbench/theorem.hpp"

using namespace lfdbench;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("slip threshold") {
  REQUIRE(stuck_slip_threshold(1) == 1);
  REQUIRE(stuck_slip_threshold(2) == 2);
  REQUIRE(stuck_slip_threshold(3) == 3);
  REQUIRE(stuck_slip_threshold(4) == 4);
  REQUIRE(stuck_slip_threshold(5) == 4);
  REQUIRE(stuck_slip_threshold(8) == 7);
  REQUIRE(stuck_slip_threshold(12) == 10);
  REQUIRE(stuck_slip_threshold(100) == 76);
}

TEST_CASE("exact stuck probabilities at mu = 1/4") {
  // With mu = 1/4 and m <= 4 the threshold equals m, so the tail collapses to
  // mu^m; the m = 8 and m = 12 values were frozen from an exact big-rational
  // evaluation of the binomial sum.
  REQUIRE(rel_err(rc_stuck_probability_exact(1, 0.25), 0.25) < 1e-15);
  REQUIRE(rel_err(rc_stuck_probability_exact(2, 0.25), 0.0625) < 1e-15);
  REQUIRE(rel_err(rc_stuck_probability_exact(3, 0.25), 0.015625) < 1e-15);
  REQUIRE(rel_err(rc_stuck_probability_exact(4, 0.25), 0.00390625) < 1e-15);
  REQUIRE(rel_err(rc_stuck_probability_exact(8, 0.25), 0.0003814697265625) < 1e-13);
  REQUIRE(rel_err(rc_stuck_probability_exact(12, 0.25), 3.76105308532714844e-5) < 1e-13);
}

TEST_CASE("exact stuck probabilities away from 1/4") {
  REQUIRE(rc_stuck_probability_exact(3, 0.0) == 0.0);
  // m = 2, mu = 0.1: needs both demos slipped, so 0.01 exactly.
  REQUIRE(rel_err(rc_stuck_probability_exact(2, 0.1), 0.01) < 1e-14);
  // m = 4, mu = 0.1: all four slipped, 1e-4.
  REQUIRE(rel_err(rc_stuck_probability_exact(4, 0.1), 1e-4) < 1e-13);
  // m = 5, mu = 0.1: P(Z >= 4) = 5 * 0.1^4 * 0.9 + 0.1^5 = 4.6e-4.
  REQUIRE(rel_err(rc_stuck_probability_exact(5, 0.1), 4.6e-4) < 1e-13);

  REQUIRE_THROWS_AS(rc_stuck_probability_exact(0, 0.25), ConfigError);
  REQUIRE_THROWS_AS(rc_stuck_probability_exact(3, 1.0), ConfigError);
  REQUIRE_THROWS_AS(rc_stuck_probability_exact(3, -0.1), ConfigError);
}

TEST_CASE("monte carlo agrees with the exact tail") {
  for (int m : {1, 2, 4}) {
    const double exact = rc_stuck_probability_exact(m, 0.25);
    const McEstimate mc = rc_stuck_probability_mc(m, 0.25, 40000, 77);
    const double sigma = std::sqrt(exact * (1.0 - exact) / 40000.0);
    INFO("m = " << m << " exact " << exact << " mc " << mc.estimate);
    REQUIRE(std::abs(mc.estimate - exact) < 4.0 * sigma);
    REQUIRE(mc.trials == 40000);
    REQUIRE(mc.successes >= 0);
  }
  REQUIRE_THROWS_AS(rc_stuck_probability_mc(1, 0.25, 0, 1), ConfigError);
}

TEST_CASE("once stuck the aggregation rounds never recover") {
  // The estimator itself throws if any trial flips R back to L in a later
  // round; running it with extra rounds doubles as the absorption check.
  const McEstimate mc = rc_stuck_probability_mc(1, 0.25, 5000, 3, 6);
  REQUIRE(mc.estimate > 0.0);
}

TEST_CASE("the gaussian comparison stays below the exact tail where valid") {
  REQUIRE(rel_err(gaussian_tail_bound(1, 0.25).value, 0.04163225833) < 1e-9);
  REQUIRE(rel_err(gaussian_tail_bound(4, 0.25).value, 0.0002660027526) < 1e-9);
  REQUIRE(gaussian_tail_bound(1, 0.25).valid);
  REQUIRE(gaussian_tail_bound(4, 0.25).valid);
  // mu = 1/2 pushes the threshold past m(1 - mu) for small m: hypotheses fail.
  REQUIRE_FALSE(gaussian_tail_bound(4, 0.5).valid);

  for (int m = 1; m <= 20; ++m) {
    const SludBound b = gaussian_tail_bound(m, 0.25);
    if (!b.valid) continue;
    const double exact = rc_stuck_probability_exact(m, 0.25);
    INFO("m = " << m);
    REQUIRE(b.value <= exact * (1.0 + 1e-12));
  }

  REQUIRE_THROWS_AS(gaussian_tail_bound(0, 0.25), ConfigError);
  REQUIRE_THROWS_AS(gaussian_tail_bound(4, 0.0), ConfigError);
  REQUIRE_THROWS_AS(gaussian_tail_bound(4, 0.6), ConfigError);
}

TEST_CASE("supervisor-distribution training converges to the left policy") {
  const std::vector<int> ns = {1, 4, 16, 64};
  const auto curve = hc_convergence_curve(ns, 0.25, 4000, 5);
  REQUIRE(curve.size() == 4);

  // A single demo fits L unless it slips, so p_left(1) = 3/4.
  const double sigma1 = std::sqrt(0.75 * 0.25 / 4000.0);
  REQUIRE(std::abs(curve[0].p_left - 0.75) < 4.0 * sigma1);

  // The curve rises toward 1 (within noise) and is effectively there by 64.
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double slack =
        3.0 * std::sqrt(curve[i - 1].stderr_ * curve[i - 1].stderr_ +
                        curve[i].stderr_ * curve[i].stderr_ + 1e-12);
    REQUIRE(curve[i].p_left >= curve[i - 1].p_left - slack);
  }
  REQUIRE(curve[3].p_left >= 0.999);

  // With a slip-free root every fit is L.
  const auto clean = hc_convergence_curve({1, 2}, 0.0, 500, 5);
  REQUIRE(clean[0].p_left == 1.0);
  REQUIRE(clean[1].p_left == 1.0);

  REQUIRE_THROWS_AS(hc_convergence_curve({0}, 0.25, 10, 1), ConfigError);
  REQUIRE_THROWS_AS(hc_convergence_curve({1}, 0.25, 0, 1), ConfigError);
}

TEST_CASE("theorem table layout") {
  const auto rows = theorem_table({1, 2}, 0.25, 2000, 9);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].m == 1);
  REQUIRE(rows[1].m == 2);
  REQUIRE(rel_err(rows[0].exact, 0.25) < 1e-15);
  REQUIRE(rel_err(rows[1].exact, 0.0625) < 1e-15);
  REQUIRE(rows[0].bound_valid);

  const std::string csv = theorem_table_csv(rows);
  REQUIRE(csv.rfind("m,mu,exact,mc,stderr,bound,bound_valid\n", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 3);
  REQUIRE(csv.find("1,0.25,0.25,") != std::string::npos);
}

TEST_CASE("number formatting keeps ten significant digits") {
  REQUIRE(format_double(0.25) == "0.25");
  REQUIRE(format_double(3.76105308532714844e-5) == "3.761053085e-05");
  REQUIRE(format_double(1.0) == "1");
}
