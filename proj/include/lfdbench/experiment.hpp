#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "lfdbench/decision_tree.hpp"
#include "lfdbench/grid_world.hpp"
#include "lfdbench/least_squares.hpp"
#include "lfdbench/linear_classifier.hpp"
#include "lfdbench/lqr.hpp"
#include "lfdbench/metrics.hpp"
#include "lfdbench/point_mass.hpp"
#include "lfdbench/sampling.hpp"
#include "lfdbench/serialization.hpp"
#include "lfdbench/supervisors.hpp"
#include "lfdbench/theorem.hpp"
#include "lfdbench/types.hpp"
#include "lfdbench/value_iteration.hpp"

namespace lfdbench {

enum class ExperimentKind { kGridExpressiveness, kGridNoisy, kPointmassConvergence, kTheorem };
enum class LearnerKind { kLinear, kTree };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kGridExpressiveness;
  LearnerKind learner = LearnerKind::kLinear;  // grid kinds only
  std::vector<int> schedule;                   // demonstration budgets, strictly increasing
  int trials = 100;
  std::uint64_t master_seed = 1;
  std::string output = "results.csv";
  int n_eval = 50;
  int horizon = 30;

  // Grid settings.
  int width = 15;
  int height = 15;
  double slip_prob = 0.16;
  double penalty_frac = 0.08;
  double gamma = 0.99;
  double vi_tol = 1e-6;
  double flip_prob = 0.3;  // grid-noisy only

  // Point-mass settings.
  double noise_variance = 0.1;
  double label_noise_std = 2.0;  // Gaussian noise on retroactive labels
  double ridge = 1e-6;

  double rc_beta = 0.0;

  // Stuck-probability table settings.
  std::vector<int> m_values;
  double mu = 0.25;
  long mc_trials = 100000;

  bool save_policies = false;
  bool save_heldout = false;
};

inline const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kGridExpressiveness: return "grid-expressiveness";
    case ExperimentKind::kGridNoisy: return "grid-noisy";
    case ExperimentKind::kPointmassConvergence: return "pointmass-convergence";
    case ExperimentKind::kTheorem: return "theorem";
  }
  return "?";
}

inline const char* learner_name(LearnerKind k) {
  return k == LearnerKind::kLinear ? "linear" : "tree";
}

// A budget b reserves its last floor(b/6) demonstrations for held-out loss
// measurement; the rest train the policy.
inline int heldout_count(int budget) { return budget / 6; }
inline int train_count(int budget) { return budget - heldout_count(budget); }

namespace detail {

inline std::vector<int> default_schedule(ExperimentKind kind) {
  std::vector<int> s;
  if (kind == ExperimentKind::kGridExpressiveness || kind == ExperimentKind::kGridNoisy) s.push_back(1);
  for (int b = 5; b <= 50; b += 5) s.push_back(b);
  return s;
}

inline void check_known_keys(const nlohmann::json& j, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError("config: unknown key '" + key + "' for kind '" +
                        j.at("kind").get<std::string>() + "'");
  }
}

}  // namespace detail

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  if (!j.contains("kind")) throw ConfigError("config: missing required key 'kind'");
  ExperimentConfig cfg;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "grid-expressiveness") cfg.kind = ExperimentKind::kGridExpressiveness;
    else if (kind == "grid-noisy") cfg.kind = ExperimentKind::kGridNoisy;
    else if (kind == "pointmass-convergence") cfg.kind = ExperimentKind::kPointmassConvergence;
    else if (kind == "theorem") cfg.kind = ExperimentKind::kTheorem;
    else throw ConfigError("config: unknown kind '" + kind + "'");

    std::set<std::string> allowed = {"kind", "output", "master_seed"};
    const bool grid =
        cfg.kind == ExperimentKind::kGridExpressiveness || cfg.kind == ExperimentKind::kGridNoisy;
    if (cfg.kind != ExperimentKind::kTheorem) {
      allowed.insert({"schedule", "trials", "n_eval", "horizon", "rc_beta", "save_policies",
                      "save_heldout"});
    }
    if (grid) {
      allowed.insert({"learner", "width", "height", "slip_prob", "penalty_frac", "gamma", "vi_tol"});
      cfg.horizon = 30;
    }
    if (cfg.kind == ExperimentKind::kGridNoisy) allowed.insert("flip_prob");
    if (cfg.kind == ExperimentKind::kPointmassConvergence) {
      allowed.insert({"noise_variance", "label_noise_std", "ridge"});
      cfg.horizon = 35;
      cfg.trials = 200;
    }
    if (cfg.kind == ExperimentKind::kTheorem) allowed.insert({"m_values", "mu", "mc_trials"});
    detail::check_known_keys(j, allowed);

    if (j.contains("learner")) {
      const std::string l = j.at("learner").get<std::string>();
      if (l == "linear") cfg.learner = LearnerKind::kLinear;
      else if (l == "tree") cfg.learner = LearnerKind::kTree;
      else throw ConfigError("config: unknown learner '" + l + "'");
    }
    cfg.schedule = j.value("schedule", detail::default_schedule(cfg.kind));
    cfg.trials = j.value("trials", cfg.trials);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.output = j.value("output", cfg.output);
    cfg.n_eval = j.value("n_eval", cfg.n_eval);
    cfg.horizon = j.value("horizon", cfg.horizon);
    cfg.width = j.value("width", cfg.width);
    cfg.height = j.value("height", cfg.height);
    cfg.slip_prob = j.value("slip_prob", cfg.slip_prob);
    cfg.penalty_frac = j.value("penalty_frac", cfg.penalty_frac);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.vi_tol = j.value("vi_tol", cfg.vi_tol);
    cfg.flip_prob = j.value("flip_prob", cfg.flip_prob);
    cfg.noise_variance = j.value("noise_variance", cfg.noise_variance);
    cfg.label_noise_std = j.value("label_noise_std", cfg.label_noise_std);
    cfg.ridge = j.value("ridge", cfg.ridge);
    cfg.rc_beta = j.value("rc_beta", cfg.rc_beta);
    cfg.m_values = j.value("m_values", cfg.m_values);
    cfg.mu = j.value("mu", cfg.mu);
    cfg.mc_trials = j.value("mc_trials", cfg.mc_trials);
    cfg.save_policies = j.value("save_policies", cfg.save_policies);
    cfg.save_heldout = j.value("save_heldout", cfg.save_heldout);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (cfg.kind == ExperimentKind::kTheorem) {
    if (cfg.m_values.empty()) throw ConfigError("config: theorem runs need m_values");
    for (const int m : cfg.m_values)
      if (m < 1) throw ConfigError("config: m_values entries must be positive");
    if (cfg.mc_trials < 1) throw ConfigError("config: mc_trials must be positive");
  } else {
    if (cfg.schedule.empty()) throw ConfigError("config: schedule must not be empty");
    int prev = 0;
    for (const int b : cfg.schedule) {
      if (b <= prev)
        throw ConfigError("config: schedule must be strictly increasing and positive");
      prev = b;
    }
    if (cfg.trials < 1) throw ConfigError("config: trials must be positive");
    if (cfg.n_eval < 1) throw ConfigError("config: n_eval must be positive");
    if (cfg.horizon < 1) throw ConfigError("config: horizon must be positive");
    if (cfg.rc_beta < 0.0 || cfg.rc_beta > 1.0)
      throw ConfigError("config: rc_beta must lie in [0, 1]");
  }
  return cfg;
}

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j{{"kind", kind_name(cfg.kind)},
                   {"master_seed", cfg.master_seed},
                   {"output", cfg.output}};
  if (cfg.kind == ExperimentKind::kTheorem) {
    j["m_values"] = cfg.m_values;
    j["mu"] = cfg.mu;
    j["mc_trials"] = cfg.mc_trials;
    return j;
  }
  j["schedule"] = cfg.schedule;
  j["trials"] = cfg.trials;
  j["n_eval"] = cfg.n_eval;
  j["horizon"] = cfg.horizon;
  j["rc_beta"] = cfg.rc_beta;
  j["save_policies"] = cfg.save_policies;
  j["save_heldout"] = cfg.save_heldout;
  if (cfg.kind == ExperimentKind::kPointmassConvergence) {
    j["noise_variance"] = cfg.noise_variance;
    j["label_noise_std"] = cfg.label_noise_std;
    j["ridge"] = cfg.ridge;
  } else {
    j["learner"] = learner_name(cfg.learner);
    j["width"] = cfg.width;
    j["height"] = cfg.height;
    j["slip_prob"] = cfg.slip_prob;
    j["penalty_frac"] = cfg.penalty_frac;
    j["gamma"] = cfg.gamma;
    j["vi_tol"] = cfg.vi_tol;
    if (cfg.kind == ExperimentKind::kGridNoisy) j["flip_prob"] = cfg.flip_prob;
  }
  return j;
}

struct ResultRow {
  int trial = 0;
  std::string algorithm;  // "hc" or "rc"
  int demos = 0;
  double norm_perf = 0.0;
  int loss_dims = 0;  // 0 no held-out set, 1 discrete, 2 continuous
  double loss1 = 0.0;
  double loss2 = 0.0;
  bool baseline_shifted = false;
  std::string error;  // nonempty marks a failed row; value columns are blank
};

inline constexpr const char* kResultCsvHeader =
    "trial,algorithm,demos,norm_perf,loss_dim1,loss_dim2,baseline_shifted,error";

inline std::string sanitize_csv_field(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

inline std::string result_rows_csv(const std::vector<ResultRow>& rows) {
  std::string out = kResultCsvHeader;
  out += '\n';
  for (const ResultRow& r : rows) {
    out += std::to_string(r.trial) + ',' + r.algorithm + ',' + std::to_string(r.demos) + ',';
    if (r.error.empty()) {
      out += format_double(r.norm_perf);
      out += ',';
      if (r.loss_dims >= 1) out += format_double(r.loss1);
      out += ',';
      if (r.loss_dims >= 2) out += format_double(r.loss2);
      out += ',';
      out += r.baseline_shifted ? '1' : '0';
      out += ',';
    } else {
      out += ",,,,";
      out += sanitize_csv_field(r.error);
    }
    out += '\n';
  }
  return out;
}

namespace detail {

// Child-stream keys hung off each trial's root stream. Fixed so that adding a
// consumer later cannot silently shift existing draws.
inline constexpr std::uint64_t kEnvStream = 1;
inline constexpr std::uint64_t kHcPoolStream = 2;
inline constexpr std::uint64_t kRcStream = 3;
inline constexpr std::uint64_t kFitStream = 4;
inline constexpr std::uint64_t kEvalStream = 5;

inline Dataset dataset_slice(const Dataset& d, std::size_t begin, std::size_t end) {
  if (end > d.size() || begin > end)
    throw ConfigError("dataset_slice: range outside the dataset");
  Dataset out;
  out.items.assign(d.items.begin() + static_cast<std::ptrdiff_t>(begin),
                   d.items.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

struct TrialOutput {
  std::vector<ResultRow> rows;
  double wall_ms = 0.0;
  long rc_dataset_items = 0;
};

inline std::filesystem::path artifact_dir(const ExperimentConfig& cfg) {
  std::filesystem::path p(cfg.output);
  p.replace_extension();
  p += "_artifacts";
  return p;
}

template <typename P>
void save_artifacts(const ExperimentConfig& cfg, int trial, const char* algo, const P& policy,
                    const Dataset& heldout) {
  if (!cfg.save_policies && !cfg.save_heldout) return;
  const std::filesystem::path dir = artifact_dir(cfg);
  std::filesystem::create_directories(dir);
  const std::string stem = "trial" + std::to_string(trial) + "_" + algo;
  if (cfg.save_policies) {
    std::ofstream f(dir / (stem + "_policy.json"));
    f << nlohmann::json(policy).dump(2) << '\n';
    if (!f) throw Error("cannot write policy artifact for " + stem);
  }
  if (cfg.save_heldout && !heldout.empty()) {
    std::ofstream f(dir / (stem + "_heldout.json"));
    f << dataset_to_json(heldout).dump(2) << '\n';
    if (!f) throw Error("cannot write held-out artifact for " + stem);
  }
}

inline void fill_loss(ResultRow& row, const HeldoutLoss& hl) {
  row.loss_dims = static_cast<int>(hl.per_dim.size());
  row.loss1 = hl.per_dim.at(0);
  if (row.loss_dims >= 2) row.loss2 = hl.per_dim.at(1);
}

// One grid trial: a fresh random world, its value-iteration supervisor, an HC
// demonstration pool whose budget prefixes give the HC policies, and a single
// RC run whose per-round snapshots give the RC policies. Snapshot k is the
// fit after k aggregation rounds, so the policy trained on n trajectories is
// snapshot n - 1. Row-level failures are recorded in the row and do not stop
// the trial.
template <typename L>
void grid_trial(const ExperimentConfig& cfg, const L& learner, int trial, TrialOutput& out) {
  const RandomSource trial_rng = trial_stream(cfg.master_seed, static_cast<std::uint64_t>(trial));
  RandomSource env_rng = trial_rng.child(kEnvStream);
  const GridWorld world =
      gridworld_generate(env_rng, cfg.width, cfg.height, cfg.penalty_frac, cfg.slip_prob);
  const GridViSupervisor supervisor(world, cfg.gamma, cfg.vi_tol);
  const double flip = cfg.kind == ExperimentKind::kGridNoisy ? cfg.flip_prob : 0.0;
  const StochasticLabeler labeler =
      flip > 0.0 ? StochasticLabeler(NoisySupervisor(
                       [&supervisor](const State& s) { return supervisor(s); }, kGridActionCount, flip))
                 : make_labeler(supervisor);

  const int max_b = cfg.schedule.back();
  const std::size_t L_len = static_cast<std::size_t>(cfg.horizon) + 1;

  RandomSource hc_rng = trial_rng.child(kHcPoolStream);
  const CollectResult pool = hc_collect(world, labeler, max_b, cfg.horizon, hc_rng);

  using Policy = PolicyOf<L>;
  // The RC stream is re-derivable, so a shorter rerun replays an exact prefix
  // of the full run. One full run normally serves every budget; if it dies
  // mid-way the per-budget reruns below still recover the budgets whose
  // snapshots precede the failure.
  auto rc_run = [&](int n_trajectories) {
    RandomSource rc_rng = trial_rng.child(kRcStream);
    RcConfig rc_cfg;
    rc_cfg.m_initial = 1;
    rc_cfg.iterations = n_trajectories - 1;
    rc_cfg.beta = cfg.rc_beta;
    return rc_dagger(world, labeler, learner, rc_cfg, cfg.horizon, rc_rng);
  };
  std::optional<RcResult<Policy>> rc_full;
  try {
    rc_full = rc_run(max_b);
    out.rc_dataset_items = static_cast<long>(rc_full->data.size());
  } catch (const Error&) {
    // fall back to per-budget reruns
  }

  for (const int b : cfg.schedule) {
    const int train_n = train_count(b);
    const std::size_t train_items = static_cast<std::size_t>(train_n) * L_len;
    const std::size_t budget_items = static_cast<std::size_t>(b) * L_len;

    ResultRow hc_row{trial, "hc", b};
    try {
      const Dataset train = dataset_slice(pool.data, 0, train_items);
      RandomSource fit_rng = trial_rng.child(kFitStream).child(static_cast<std::uint64_t>(b));
      const Policy policy = learner.fit(train, fit_rng);
      const PerfResult perf = grid_normalized_performance(world, policy, supervisor, cfg.n_eval,
                                                          cfg.horizon, trial_rng.child(kEvalStream));
      hc_row.norm_perf = perf.value;
      hc_row.baseline_shifted = perf.baseline_shifted;
      Dataset heldout;
      if (heldout_count(b) > 0) {
        heldout = dataset_slice(pool.data, train_items, budget_items);
        fill_loss(hc_row, heldout_surrogate_loss(policy, heldout));
      }
      if (b == max_b) save_artifacts(cfg, trial, "hc", policy, heldout);
    } catch (const Error& e) {
      hc_row.error = e.what();
    }
    out.rows.push_back(std::move(hc_row));

    ResultRow rc_row{trial, "rc", b};
    try {
      std::optional<RcResult<Policy>> rc_local;
      const RcResult<Policy>& rc = rc_full ? *rc_full : rc_local.emplace(rc_run(b));
      const Policy& policy = rc.policies.at(static_cast<std::size_t>(train_n) - 1);
      const PerfResult perf = grid_normalized_performance(world, policy, supervisor, cfg.n_eval,
                                                          cfg.horizon, trial_rng.child(kEvalStream));
      rc_row.norm_perf = perf.value;
      rc_row.baseline_shifted = perf.baseline_shifted;
      Dataset heldout;
      if (heldout_count(b) > 0) {
        heldout = dataset_slice(rc.data, train_items, budget_items);
        fill_loss(rc_row, heldout_surrogate_loss(policy, heldout));
      }
      if (b == max_b) save_artifacts(cfg, trial, "rc", policy, heldout);
    } catch (const Error& e) {
      rc_row.error = e.what();
    }
    out.rows.push_back(std::move(rc_row));
  }
}

// One point-mass trial, same budget protocol as the grid. Labels in the RC
// aggregate carry Gaussian noise; HC demonstrations stay clean because there
// the supervisor's executed control is the label.
inline void pointmass_trial(const ExperimentConfig& cfg, int trial, TrialOutput& out) {
  const RandomSource trial_rng = trial_stream(cfg.master_seed, static_cast<std::uint64_t>(trial));
  PointMassEnv::Params params;
  params.noise_variance = cfg.noise_variance;
  const PointMassEnv env(params);
  const SwitchingLqrSupervisor supervisor(env);
  const StochasticLabeler labeler = make_labeler(supervisor);
  const LeastSquaresLearner learner{cfg.ridge};
  const Eigen::Matrix4d Q = Eigen::Matrix4d::Identity();
  const Eigen::Matrix2d R = Eigen::Matrix2d::Identity();

  const int max_b = cfg.schedule.back();
  const std::size_t L_len = static_cast<std::size_t>(cfg.horizon) + 1;

  RandomSource hc_rng = trial_rng.child(kHcPoolStream);
  const CollectResult pool = hc_collect(env, labeler, max_b, cfg.horizon, hc_rng);

  auto rc_run = [&](int n_trajectories) {
    RandomSource rc_rng = trial_rng.child(kRcStream);
    RcConfig rc_cfg;
    rc_cfg.m_initial = 1;
    rc_cfg.iterations = n_trajectories - 1;
    rc_cfg.beta = cfg.rc_beta;
    rc_cfg.label_noise_std = cfg.label_noise_std;
    return rc_dagger(env, labeler, learner, rc_cfg, cfg.horizon, rc_rng);
  };
  std::optional<RcResult<AffinePolicy>> rc_full;
  try {
    rc_full = rc_run(max_b);
    out.rc_dataset_items = static_cast<long>(rc_full->data.size());
  } catch (const Error&) {
  }

  for (const int b : cfg.schedule) {
    const int train_n = train_count(b);
    const std::size_t train_items = static_cast<std::size_t>(train_n) * L_len;
    const std::size_t budget_items = static_cast<std::size_t>(b) * L_len;

    ResultRow hc_row{trial, "hc", b};
    try {
      const Dataset train = dataset_slice(pool.data, 0, train_items);
      RandomSource fit_rng = trial_rng.child(kFitStream).child(static_cast<std::uint64_t>(b));
      const AffinePolicy policy = learner.fit(train, fit_rng);
      const PerfResult perf = pointmass_normalized_performance(
          env, policy, supervisor, Q, R, cfg.n_eval, cfg.horizon, trial_rng.child(kEvalStream));
      hc_row.norm_perf = perf.value;
      hc_row.baseline_shifted = perf.baseline_shifted;
      Dataset heldout;
      if (heldout_count(b) > 0) {
        heldout = dataset_slice(pool.data, train_items, budget_items);
        fill_loss(hc_row, heldout_surrogate_loss(policy, heldout));
      }
      if (b == max_b) save_artifacts(cfg, trial, "hc", policy, heldout);
    } catch (const Error& e) {
      hc_row.error = e.what();
    }
    out.rows.push_back(std::move(hc_row));

    ResultRow rc_row{trial, "rc", b};
    try {
      std::optional<RcResult<AffinePolicy>> rc_local;
      const RcResult<AffinePolicy>& rc = rc_full ? *rc_full : rc_local.emplace(rc_run(b));
      const AffinePolicy& policy = rc.policies.at(static_cast<std::size_t>(train_n) - 1);
      const PerfResult perf = pointmass_normalized_performance(
          env, policy, supervisor, Q, R, cfg.n_eval, cfg.horizon, trial_rng.child(kEvalStream));
      rc_row.norm_perf = perf.value;
      rc_row.baseline_shifted = perf.baseline_shifted;
      Dataset heldout;
      if (heldout_count(b) > 0) {
        heldout = dataset_slice(rc.data, train_items, budget_items);
        fill_loss(rc_row, heldout_surrogate_loss(policy, heldout));
      }
      if (b == max_b) save_artifacts(cfg, trial, "rc", policy, heldout);
    } catch (const Error& e) {
      rc_row.error = e.what();
    }
    out.rows.push_back(std::move(rc_row));
  }
}

inline void run_trial(const ExperimentConfig& cfg, int trial, TrialOutput& out) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (cfg.kind) {
      case ExperimentKind::kGridExpressiveness:
      case ExperimentKind::kGridNoisy:
        if (cfg.learner == LearnerKind::kLinear)
          grid_trial(cfg, LinearClassifierLearner{kGridActionCount, cfg.width, cfg.height}, trial,
                     out);
        else
          grid_trial(cfg, DecisionTreeLearner{kGridActionCount, 100}, trial, out);
        break;
      case ExperimentKind::kPointmassConvergence:
        pointmass_trial(cfg, trial, out);
        break;
      case ExperimentKind::kTheorem:
        throw ConfigError("run_trial: theorem runs have no trials");
    }
  } catch (const Error& e) {
    // Trial-level failure (world generation, supervisor solve): every row of
    // the trial records it.
    out.rows.clear();
    for (const int b : cfg.schedule)
      for (const char* algo : {"hc", "rc"}) {
        ResultRow row{trial, algo, b};
        row.error = e.what();
        out.rows.push_back(std::move(row));
      }
  }
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// Worker count resolution: an explicit positive request wins, then the
// LFDBENCH_WORKERS environment variable, then hardware concurrency.
inline int resolve_workers(int requested) {
  if (requested >= 1) return requested;
  if (const char* env = std::getenv("LFDBENCH_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ConfigError("LFDBENCH_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::string csv;
  nlohmann::json manifest;
};

// Run every trial and assemble the CSV text and manifest. Trials are
// independent (each derives its streams from the master seed alone), so the
// worker count cannot change a single output byte: results are collected per
// trial slot and concatenated in trial order.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 0) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.manifest["config"] = experiment_config_to_json(cfg);

  if (cfg.kind == ExperimentKind::kTheorem) {
    const auto table = theorem_table(cfg.m_values, cfg.mu, cfg.mc_trials, cfg.master_seed);
    res.csv = theorem_table_csv(table);
    res.manifest["workers"] = 1;
    res.manifest["wall_ms_total"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

  const int n_workers = std::min(resolve_workers(workers), cfg.trials);
  std::vector<detail::TrialOutput> outputs(static_cast<std::size_t>(cfg.trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= cfg.trials) return;
      try {
        detail::run_trial(cfg, t, outputs[static_cast<std::size_t>(t)]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (std::thread& th : threads) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  nlohmann::json trial_ms = nlohmann::json::array();
  nlohmann::json rc_sizes = nlohmann::json::array();
  long error_rows = 0;
  for (const detail::TrialOutput& out : outputs) {
    for (const ResultRow& row : out.rows) {
      if (!row.error.empty()) ++error_rows;
      res.rows.push_back(row);
    }
    trial_ms.push_back(out.wall_ms);
    rc_sizes.push_back(out.rc_dataset_items);
  }
  res.csv = result_rows_csv(res.rows);
  res.manifest["workers"] = n_workers;
  res.manifest["trial_wall_ms"] = std::move(trial_ms);
  res.manifest["rc_dataset_items"] = std::move(rc_sizes);
  res.manifest["rows_with_error"] = error_rows;
  res.manifest["wall_ms_total"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + path + "' failed");
}

// CSV goes to cfg.output, the manifest next to it with a .manifest.json
// suffix on the stem.
inline void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentResult& res) {
  write_text_file(cfg.output, res.csv);
  std::filesystem::path mp(cfg.output);
  mp.replace_extension();
  mp += ".manifest.json";
  write_text_file(mp.string(), res.manifest.dump(2) + "\n");
}

}  // namespace lfdbench
