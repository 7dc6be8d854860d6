#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "lfdbench/experiment.hpp"
#include "lfdbench/plot.hpp"
#include "lfdbench/serialization.hpp"
#include "lfdbench/theorem.hpp"

namespace {

// "a..b" -> {a, a+1, ..., b}
std::vector<int> parse_m_range(const std::string& text) {
  const std::size_t dots = text.find("..");
  if (dots == std::string::npos)
    throw lfdbench::ConfigError("--m-range expects the form a..b, got '" + text + "'");
  int lo = 0, hi = 0;
  try {
    std::size_t used = 0;
    lo = std::stoi(text.substr(0, dots), &used);
    if (used != dots) throw std::invalid_argument("lo");
    const std::string rest = text.substr(dots + 2);
    hi = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("hi");
  } catch (const std::exception&) {
    throw lfdbench::ConfigError("--m-range expects integers in a..b, got '" + text + "'");
  }
  if (lo < 1 || hi < lo)
    throw lfdbench::ConfigError("--m-range needs 1 <= a <= b, got '" + text + "'");
  std::vector<int> out;
  for (int m = lo; m <= hi; ++m) out.push_back(m);
  return out;
}

int run_config(const std::string& path, int workers) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(lfdbench::read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw lfdbench::ConfigError("config '" + path + "': " + e.what());
  } catch (const lfdbench::Error& e) {
    throw lfdbench::ConfigError(e.what());
  }
  const lfdbench::ExperimentConfig cfg = lfdbench::experiment_config_from_json(j);
  lfdbench::ExperimentResult res;
  try {
    res = lfdbench::run_experiment(cfg, workers);
  } catch (const lfdbench::ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    // Leave at least a parseable header behind before reporting the failure.
    try {
      lfdbench::write_text_file(cfg.output, std::string(lfdbench::kResultCsvHeader) + "\n");
    } catch (const lfdbench::Error&) {
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  lfdbench::write_experiment_outputs(cfg, res);
  const long data_lines =
      std::count(res.csv.begin(), res.csv.end(), '\n') - (res.csv.empty() ? 0 : 1);
  std::cout << cfg.output << ": " << data_lines << " rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imitation learning benchmark: demonstration sampling experiments"};
  app.require_subcommand(1);

  std::string config_path;
  int workers = 0;
  CLI::App* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "worker threads (0 = LFDBENCH_WORKERS or hardware)");

  std::string m_range;
  double mu = 0.25;
  long trials = 0;
  std::uint64_t seed = 1;
  std::string theorem_out;
  CLI::App* theorem = app.add_subcommand("theorem", "stuck-probability table: exact, sampled, bound");
  theorem->add_option("--m-range", m_range, "demonstration counts a..b")->required();
  theorem->add_option("--mu", mu, "root slip probability")->required();
  theorem->add_option("--trials", trials, "sampling trials per m")->required();
  theorem->add_option("--seed", seed, "master seed");
  theorem->add_option("--output", theorem_out, "CSV path (default stdout)");

  std::string plot_csv, plot_svg;
  CLI::App* plot = app.add_subcommand("plot", "render a results CSV as an SVG chart");
  plot->add_option("csv", plot_csv, "results CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("svg", plot_svg, "output SVG path")->required();

  std::string heldout_path, policy_path;
  CLI::App* analyze = app.add_subcommand("analyze", "held-out surrogate loss of a saved policy");
  analyze->add_option("--heldout", heldout_path, "held-out dataset JSON")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--policy", policy_path, "policy JSON")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return run_config(config_path, workers);
    if (theorem->parsed()) {
      const auto table = lfdbench::theorem_table(parse_m_range(m_range), mu, trials, seed);
      const std::string csv = lfdbench::theorem_table_csv(table);
      if (theorem_out.empty())
        std::cout << csv;
      else
        lfdbench::write_text_file(theorem_out, csv);
      return 0;
    }
    if (plot->parsed()) {
      lfdbench::write_text_file(plot_svg,
                                lfdbench::plot_results_csv(lfdbench::read_text_file(plot_csv)));
      return 0;
    }
    if (analyze->parsed()) {
      nlohmann::json hj, pj;
      try {
        hj = nlohmann::json::parse(lfdbench::read_text_file(heldout_path));
        pj = nlohmann::json::parse(lfdbench::read_text_file(policy_path));
      } catch (const nlohmann::json::exception& e) {
        throw lfdbench::ConfigError(std::string("analyze inputs: ") + e.what());
      }
      const lfdbench::Dataset heldout = lfdbench::dataset_from_json(hj);
      const auto policy = lfdbench::policy_from_json(pj);
      const lfdbench::HeldoutLoss loss = lfdbench::heldout_surrogate_loss(policy, heldout);
      std::cout << "items=" << loss.count << "\n";
      for (std::size_t d = 0; d < loss.per_dim.size(); ++d)
        std::cout << "loss_dim" << d + 1 << "=" << lfdbench::format_double(loss.per_dim[d]) << "\n";
      std::cout << "total=" << lfdbench::format_double(loss.total()) << "\n";
      return 0;
    }
  } catch (const lfdbench::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
