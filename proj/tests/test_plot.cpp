#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <string>

#include "lfdbench/plot.hpp"

using namespace lfdbench;

namespace {

const char* kHeader = "trial,algorithm,demos,norm_perf,loss_dim1,loss_dim2,baseline_shifted,error\n";

}  // namespace

TEST_CASE("aggregation computes means and standard errors per cell") {
  std::string csv = kHeader;
  csv += "0,hc,5,0.2,,,0,\n";
  csv += "1,hc,5,0.4,,,0,\n";
  csv += "0,hc,10,1.0,,,0,\n";
  csv += "0,rc,5,0.8,,,0,\n";

  const auto series = aggregate_results_csv(csv);
  REQUIRE(series.size() == 2);
  REQUIRE(series[0].name == "hc");  // first appearance order
  REQUIRE(series[1].name == "rc");

  REQUIRE(series[0].points.size() == 2);
  const PlotPoint& p5 = series[0].points[0];
  REQUIRE(p5.demos == 5);
  REQUIRE(p5.n == 2);
  REQUIRE(std::abs(p5.mean - 0.3) < 1e-12);
  // Sample sd of {0.2, 0.4} is sqrt(0.02); stderr divides by sqrt(2).
  REQUIRE(std::abs(p5.stderr_ - 0.1) < 1e-12);

  const PlotPoint& p10 = series[0].points[1];
  REQUIRE(p10.n == 1);
  REQUIRE(p10.mean == 1.0);
  REQUIRE(p10.stderr_ == 0.0);

  REQUIRE(series[1].points.size() == 1);
  REQUIRE(series[1].points[0].mean == 0.8);
}

TEST_CASE("failed rows are skipped, not aggregated") {
  std::string csv = kHeader;
  csv += "0,hc,5,0.2,,,0,\n";
  csv += "1,hc,5,,,,,value iteration blew up\n";
  const auto series = aggregate_results_csv(csv);
  REQUIRE(series.size() == 1);
  REQUIRE(series[0].points[0].n == 1);
  REQUIRE(series[0].points[0].mean == 0.2);

  std::string all_failed = kHeader;
  all_failed += "0,hc,5,,,,,oops\n";
  REQUIRE_THROWS_WITH(aggregate_results_csv(all_failed),
                      Catch::Matchers::ContainsSubstring("no plottable rows"));
}

TEST_CASE("structural problems name the line") {
  REQUIRE_THROWS_WITH(aggregate_results_csv(""), Catch::Matchers::ContainsSubstring("empty input"));
  REQUIRE_THROWS_WITH(aggregate_results_csv("trial,algorithm\n"),
                      Catch::Matchers::ContainsSubstring("line 1"));

  std::string short_row = kHeader;
  short_row += "0,hc,5,0.2\n";
  REQUIRE_THROWS_WITH(aggregate_results_csv(short_row),
                      Catch::Matchers::ContainsSubstring("line 2: expected 8 fields"));

  std::string bad_number = kHeader;
  bad_number += "0,hc,5,0.2,,,0,\n";
  bad_number += "0,hc,x5,0.2,,,0,\n";
  REQUIRE_THROWS_WITH(aggregate_results_csv(bad_number),
                      Catch::Matchers::ContainsSubstring("line 3"));

  std::string trailing = kHeader;
  trailing += "0,hc,5,0.25e,,,0,\n";
  REQUIRE_THROWS_AS(aggregate_results_csv(trailing), ConfigError);
}

TEST_CASE("carriage returns and blank lines are tolerated") {
  std::string csv = "trial,algorithm,demos,norm_perf,loss_dim1,loss_dim2,baseline_shifted,error\r\n";
  csv += "0,hc,5,0.5,,,0,\r\n";
  csv += "\n";
  csv += "1,hc,5,0.7,,,0,\n";
  const auto series = aggregate_results_csv(csv);
  REQUIRE(series[0].points[0].n == 2);
  REQUIRE(std::abs(series[0].points[0].mean - 0.6) < 1e-12);
}

TEST_CASE("rendered chart is deterministic and well formed") {
  std::string csv = kHeader;
  for (int t = 0; t < 3; ++t)
    for (int b : {5, 10, 20}) {
      csv += std::to_string(t) + ",hc," + std::to_string(b) + "," +
             format_double(0.5 + 0.01 * t + 0.02 * b) + ",,,0,\n";
      csv += std::to_string(t) + ",rc," + std::to_string(b) + "," +
             format_double(0.3 + 0.02 * t + 0.01 * b) + ",,,0,\n";
    }

  const std::string svg = plot_results_csv(csv);
  REQUIRE(svg == plot_results_csv(csv));
  REQUIRE(svg.rfind("<svg ", 0) == 0);
  REQUIRE(svg.find("</svg>") != std::string::npos);
  REQUIRE(svg.find("#2a6fb0") != std::string::npos);  // hc color
  REQUIRE(svg.find("#c23b3b") != std::string::npos);  // rc color
  REQUIRE(svg.find("normalized performance vs demonstrations") != std::string::npos);
  REQUIRE(svg.find("<polyline") != std::string::npos);
  REQUIRE(svg.find(">hc</text>") != std::string::npos);
  REQUIRE(svg.find(">rc</text>") != std::string::npos);

  // Error bars appear once a cell has spread across trials.
  REQUIRE(std::count(svg.begin(), svg.end(), '\n') > 20);
}

TEST_CASE("single-point series renders a marker but no line") {
  std::string csv = kHeader;
  csv += "0,hc,5,0.5,,,0,\n";
  const std::string svg = plot_results_csv(csv);
  REQUIRE(svg.find("<circle") != std::string::npos);
  REQUIRE(svg.find("<polyline") == std::string::npos);
}
