#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "lfdbench/grid_world.hpp"
#include "lfdbench/point_mass.hpp"
#include "lfdbench/rng.hpp"
#include "lfdbench/rollout.hpp"

namespace lfdbench {

// Undiscounted cumulative reward over every occupied state of a grid rollout.
inline double grid_return(const GridWorld& w, const Trajectory& traj) {
  double total = 0.0;
  for (const auto& [s, u] : traj.pairs) {
    (void)u;
    total += w.reward(s);
  }
  return total;
}

// Mean return over n_eval rollouts, one derived child stream per rollout so
// different policies evaluated against the same base stream share start cells
// and slip draws (paired evaluation).
template <PolicyLike P>
double mean_grid_return(const GridWorld& w, P&& policy, int n_eval, int horizon,
                        const RandomSource& eval_base) {
  if (n_eval < 1) throw ConfigError("mean_grid_return: n_eval must be positive");
  double total = 0.0;
  for (int i = 0; i < n_eval; ++i) {
    RandomSource rng = eval_base.child(static_cast<std::uint64_t>(i));
    total += grid_return(w, rollout(w, policy, horizon, rng));
  }
  return total / n_eval;
}

// Plain performance ratio; refuses a vanishing baseline so callers are forced
// to shift rather than divide by nothing.
inline double performance_ratio(double policy_mean, double supervisor_mean) {
  if (std::abs(supervisor_mean) < 1e-9)
    throw ZeroBaselineError("performance_ratio: supervisor baseline is zero; shift by the return floor");
  return policy_mean / supervisor_mean;
}

struct PerfResult {
  double value = 0.0;
  bool baseline_shifted = false;
  double policy_mean = 0.0;
  double supervisor_mean = 0.0;
};

// Grid normalized performance: policy mean return over supervisor mean
// return, 1.0 meaning parity with the supervisor. Adversarial worlds can
// push the supervisor baseline toward zero or below, where the plain ratio
// is meaningless; those runs shift both means by the worst-case return floor
// -10 * horizon before dividing and carry a flag saying so.
template <PolicyLike P, PolicyLike S>
PerfResult grid_normalized_performance(const GridWorld& w, P&& policy, S&& supervisor, int n_eval,
                                       int horizon, const RandomSource& eval_base) {
  PerfResult out;
  out.policy_mean = mean_grid_return(w, policy, n_eval, horizon, eval_base);
  out.supervisor_mean = mean_grid_return(w, supervisor, n_eval, horizon, eval_base);
  if (out.supervisor_mean < 1.0) {
    const double floor = -10.0 * horizon;
    const double denom = out.supervisor_mean - floor;
    if (std::abs(denom) < 1e-9)
      throw ZeroBaselineError("grid_normalized_performance: shifted baseline still zero");
    out.value = (out.policy_mean - floor) / denom;
    out.baseline_shifted = true;
  } else {
    out.value = performance_ratio(out.policy_mean, out.supervisor_mean);
  }
  return out;
}

// Cumulative quadratic cost sum x'Qx + u'Ru over a point-mass rollout under
// `policy`. A diverging rollout (non-finite state or control) costs +inf
// rather than aborting the evaluation.
template <PolicyLike P>
double pointmass_rollout_cost(const PointMassEnv& env, P&& policy, const Eigen::Matrix4d& Q,
                              const Eigen::Matrix2d& R, int horizon, RandomSource& rng) {
  double cost = 0.0;
  State s = env.sample_initial(rng);
  for (int t = 0; t <= horizon; ++t) {
    const PointMassState& x = get_checked<PointMassState>(s, "pointmass_rollout_cost");
    if (!x.allFinite()) return std::numeric_limits<double>::infinity();
    const Control u = policy(s);
    const ContinuousControl& f = as_continuous(u, "pointmass_rollout_cost");
    if (!f.allFinite()) return std::numeric_limits<double>::infinity();
    cost += x.dot(Q * x) + f.dot(R * f);
    if (t < horizon) s = env.step(s, u, rng);
  }
  return cost;
}

// Point-mass normalized performance: supervisor mean cost over policy mean
// cost (so 1.0 is parity and worse policies fall toward 0), paired streams as
// in the grid case. A policy whose evaluations diverge scores 0.
template <PolicyLike P, PolicyLike S>
PerfResult pointmass_normalized_performance(const PointMassEnv& env, P&& policy, S&& supervisor,
                                            const Eigen::Matrix4d& Q, const Eigen::Matrix2d& R,
                                            int n_eval, int horizon, const RandomSource& eval_base) {
  if (n_eval < 1) throw ConfigError("pointmass_normalized_performance: n_eval must be positive");
  double policy_total = 0.0;
  double supervisor_total = 0.0;
  for (int i = 0; i < n_eval; ++i) {
    RandomSource rng_p = eval_base.child(static_cast<std::uint64_t>(i));
    policy_total += pointmass_rollout_cost(env, policy, Q, R, horizon, rng_p);
    RandomSource rng_s = eval_base.child(static_cast<std::uint64_t>(i));
    supervisor_total += pointmass_rollout_cost(env, supervisor, Q, R, horizon, rng_s);
  }
  PerfResult out;
  out.policy_mean = policy_total / n_eval;
  out.supervisor_mean = supervisor_total / n_eval;
  if (!std::isfinite(out.supervisor_mean) || out.supervisor_mean <= 0.0)
    throw ZeroBaselineError("pointmass_normalized_performance: supervisor cost not positive finite");
  out.value = std::isfinite(out.policy_mean) && out.policy_mean > 0.0
                  ? out.supervisor_mean / out.policy_mean
                  : 0.0;
  return out;
}

struct HeldoutLoss {
  std::vector<double> per_dim;  // one entry for discrete labels, two for continuous
  long count = 0;

  double total() const {
    double t = 0.0;
    for (const double v : per_dim) t += v;
    return t;
  }
};

// Mean surrogate loss of a policy's predictions against held-out labels,
// reported per control dimension: a single disagreement rate for discrete
// labels, per-axis mean squared error for continuous ones. Summing the
// entries recovers the mean aggregate surrogate loss on the same items.
template <PolicyLike P>
HeldoutLoss heldout_surrogate_loss(P&& policy, const Dataset& heldout) {
  if (heldout.empty()) throw EmptyDatasetError("heldout_surrogate_loss: empty held-out set");
  HeldoutLoss out;
  const bool discrete = std::holds_alternative<DiscreteAction>(heldout.items.front().label);
  out.per_dim.assign(discrete ? 1 : 2, 0.0);
  for (const auto& item : heldout.items) {
    const Control pred = policy(item.state);
    if (discrete) {
      out.per_dim[0] += surrogate_loss(pred, item.label);
    } else {
      const ContinuousControl& u = as_continuous(item.label, "heldout_surrogate_loss");
      const ContinuousControl& p = as_continuous(pred, "heldout_surrogate_loss");
      out.per_dim[0] += (p(0) - u(0)) * (p(0) - u(0));
      out.per_dim[1] += (p(1) - u(1)) * (p(1) - u(1));
    }
    ++out.count;
  }
  for (double& v : out.per_dim) v /= static_cast<double>(out.count);
  return out;
}

inline double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw ConfigError("pearson_correlation: need two same-length series of length >= 2");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0.0 || vb == 0.0)
    throw ZeroVarianceError("pearson_correlation: a series has zero variance");
  return cov / std::sqrt(va * vb);
}

}  // namespace lfdbench
