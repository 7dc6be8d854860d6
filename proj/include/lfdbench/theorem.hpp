#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "lfdbench/dag.hpp"
#include "lfdbench/majority_vote.hpp"
#include "lfdbench/rng.hpp"
#include "lfdbench/sampling.hpp"
#include "lfdbench/supervisors.hpp"

namespace lfdbench {

// The failure event for robot-centric sampling on the tree environment is a
// strict majority of R labels after m demonstrations. Each slipped
// demonstration contributes (L,R,R) and each clean one (L,L,L), so R leads
// exactly when the slip count Z ~ Bin(m, mu) satisfies 4Z > 3m, i.e.
// Z >= floor(3m/4) + 1.
inline int stuck_slip_threshold(int m) { return (3 * m) / 4 + 1; }

// Upper binomial tail P(Bin(m, mu) >= k) for k = stuck_slip_threshold(m),
// summed in log space so tiny tails keep full relative precision.
inline double rc_stuck_probability_exact(int m, double mu) {
  if (m < 1) throw ConfigError("rc_stuck_probability_exact: m must be positive");
  if (mu < 0.0 || mu >= 1.0)
    throw ConfigError("rc_stuck_probability_exact: mu must lie in [0, 1)");
  if (mu == 0.0) return 0.0;
  const int k = stuck_slip_threshold(m);
  if (k > m) return 0.0;
  const double log_mu = std::log(mu);
  const double log_nu = std::log1p(-mu);
  const double lg_m1 = std::lgamma(m + 1.0);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(m - k) + 1);
  double peak = -std::numeric_limits<double>::infinity();
  for (int j = k; j <= m; ++j) {
    const double t = lg_m1 - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0) + j * log_mu +
                     (m - j) * log_nu;
    terms.push_back(t);
    peak = std::max(peak, t);
  }
  double acc = 0.0;
  for (const double t : terms) acc += std::exp(t - peak);
  return std::exp(peak) * acc;
}

// Gaussian lower-bound surrogate for the stuck probability (Slud-type normal
// comparison at the tail threshold). Uses the upper normal tail
// Q(z) = 1 - Phi(z); the marker records whether the comparison theorem's
// hypotheses hold at (m, mu), and the bound is non-binding when they do not.
struct SludBound {
  double value = 0.0;
  bool valid = false;
};

inline SludBound gaussian_tail_bound(int m, double mu) {
  if (m < 1) throw ConfigError("gaussian_tail_bound: m must be positive");
  if (mu <= 0.0 || mu > 0.5)
    throw ConfigError("gaussian_tail_bound: mu must lie in (0, 1/2]");
  const int k = stuck_slip_threshold(m);
  const double mean = m * mu;
  const double z = (k - mean) / std::sqrt(m * mu * (1.0 - mu));
  SludBound out;
  out.value = 0.5 * std::erfc(z / std::sqrt(2.0));
  out.valid = (k >= mean) && (mu <= 0.25 || k <= m * (1.0 - mu));
  return out;
}

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  long successes = 0;
  long trials = 0;
};

// Monte Carlo estimate of the stuck probability through the full pipeline:
// per trial, m supervisor demonstrations on the tree, a majority-vote fit,
// and then `absorption_iterations` DAgger rounds. A trial counts as stuck
// when the *initial* fit is R (the event the exact tail computes); the extra
// rounds exist to check the absorption argument, so any policy that is R at
// some round and not R afterwards fails loudly.
inline McEstimate rc_stuck_probability_mc(int m, double mu, long trials,
                                          std::uint64_t master_seed,
                                          int absorption_iterations = 3) {
  if (trials < 1) throw ConfigError("rc_stuck_probability_mc: need at least one trial");
  const DagEnv env(mu);
  const StochasticLabeler labeler = make_labeler(DagSupervisor{});
  const MajorityVoteLearner learner;
  RcConfig cfg;
  cfg.m_initial = m;
  cfg.iterations = absorption_iterations;
  McEstimate out;
  out.trials = trials;
  for (long t = 0; t < trials; ++t) {
    RandomSource rng = trial_stream(master_seed, static_cast<std::uint64_t>(t));
    const auto result = rc_dagger(env, labeler, learner, cfg, 2, rng);
    bool seen_r = false;
    for (const ConstantPolicy& p : result.policies) {
      const bool is_r = p.action() == kDagRight;
      if (seen_r && !is_r)
        throw Error("rc_stuck_probability_mc: absorption violated (R flipped back)");
      seen_r = seen_r || is_r;
    }
    if (result.policies.front().action() == kDagRight) ++out.successes;
  }
  out.estimate = static_cast<double>(out.successes) / static_cast<double>(trials);
  out.stderr_ = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
  return out;
}

// P(theta_HC = L) after n supervisor demonstrations, estimated through the
// same pipeline without any aggregation rounds.
struct HcCurvePoint {
  int n = 0;
  double p_left = 0.0;
  double stderr_ = 0.0;
};

inline std::vector<HcCurvePoint> hc_convergence_curve(const std::vector<int>& n_values, double mu,
                                                      long trials, std::uint64_t master_seed) {
  if (trials < 1) throw ConfigError("hc_convergence_curve: need at least one trial");
  const DagEnv env(mu);
  const StochasticLabeler labeler = make_labeler(DagSupervisor{});
  const MajorityVoteLearner learner;
  std::vector<HcCurvePoint> out;
  out.reserve(n_values.size());
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const int n = n_values[i];
    if (n < 1) throw ConfigError("hc_convergence_curve: demo counts must be positive");
    long left = 0;
    for (long t = 0; t < trials; ++t) {
      RandomSource rng =
          trial_stream(master_seed, (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(t));
      const CollectResult demos = hc_collect(env, labeler, n, 2, rng);
      if (hc_train(learner, demos.data, rng).action() == kDagLeft) ++left;
    }
    HcCurvePoint pt;
    pt.n = n;
    pt.p_left = static_cast<double>(left) / static_cast<double>(trials);
    pt.stderr_ = std::sqrt(pt.p_left * (1.0 - pt.p_left) / static_cast<double>(trials));
    out.push_back(pt);
  }
  return out;
}

struct StuckProbability {
  int m = 0;
  double mu = 0.0;
  double exact = 0.0;
  double mc = 0.0;
  double mc_stderr = 0.0;
  double bound = 0.0;
  bool bound_valid = false;
};

inline std::vector<StuckProbability> theorem_table(const std::vector<int>& m_values, double mu,
                                                   long trials, std::uint64_t master_seed) {
  std::vector<StuckProbability> rows;
  rows.reserve(m_values.size());
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    StuckProbability row;
    row.m = m_values[i];
    row.mu = mu;
    row.exact = rc_stuck_probability_exact(row.m, mu);
    const McEstimate mc =
        rc_stuck_probability_mc(row.m, mu, trials, master_seed + (static_cast<std::uint64_t>(i) << 40));
    row.mc = mc.estimate;
    row.mc_stderr = mc.stderr_;
    const SludBound b = gaussian_tail_bound(row.m, mu);
    row.bound = b.value;
    row.bound_valid = b.valid;
    rows.push_back(row);
  }
  return rows;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string theorem_table_csv(const std::vector<StuckProbability>& rows) {
  std::string out = "m,mu,exact,mc,stderr,bound,bound_valid\n";
  for (const auto& r : rows) {
    out += std::to_string(r.m) + ',' + format_double(r.mu) + ',' + format_double(r.exact) + ',' +
           format_double(r.mc) + ',' + format_double(r.mc_stderr) + ',' + format_double(r.bound) +
           ',' + (r.bound_valid ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace lfdbench
