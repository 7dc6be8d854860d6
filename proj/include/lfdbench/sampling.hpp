#pragma once

#include <type_traits>
#include <utility>
#include <vector>

#include "lfdbench/rng.hpp"
#include "lfdbench/rollout.hpp"
#include "lfdbench/supervisors.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

struct CollectResult {
  Dataset data;
  std::vector<Trajectory> trajectories;
};

// Demonstration sampling from the supervisor's own state distribution: n
// rollouts where the supervisor both chooses and labels every control. With a
// stochastic labeler the executed control IS the drawn label, so demonstrated
// and recorded behavior never disagree.
template <Environment E>
CollectResult hc_collect(const E& env, const StochasticLabeler& supervisor, int n_demos,
                         int horizon, RandomSource& rng) {
  if (n_demos < 0) throw ConfigError("hc_collect: n_demos must be nonnegative");
  CollectResult out;
  out.trajectories.reserve(static_cast<std::size_t>(n_demos));
  for (int j = 0; j < n_demos; ++j) {
    Trajectory traj = rollout(env, [&](const State& s) { return supervisor(s, rng); }, horizon, rng);
    out.data.append_trajectory(traj, Provenance{0, j});
    out.trajectories.push_back(std::move(traj));
  }
  return out;
}

template <typename L>
using PolicyOf = std::decay_t<decltype(std::declval<const L&>().fit(
    std::declval<const Dataset&>(), std::declval<RandomSource&>()))>;

// Behavioral cloning: fit the learner once on a demonstration pool.
template <typename L>
PolicyOf<L> hc_train(const L& learner, const Dataset& data, RandomSource& rng) {
  return learner.fit(data, rng);
}

struct RcConfig {
  int m_initial = 1;                        // initial demonstrations, collected HC-style
  int iterations = 0;                       // aggregation rounds K
  std::vector<int> rollouts_per_iteration;  // size K; empty means one rollout per round
  double beta = 0.0;                        // per-step probability of executing the supervisor
  double label_noise_std = 0.0;             // Gaussian noise added to continuous labels
};

template <typename P>
struct RcResult {
  std::vector<P> policies;  // policies[k] is the fit after k aggregation rounds
  Dataset data;
  const P& final_policy() const { return policies.back(); }
};

// DAgger-style robot-centric sampling. Each round rolls out the current
// policy (mixing in the supervisor's choice per step with probability beta),
// the supervisor retroactively labels every visited state, the labels are
// appended to the aggregate, and the learner is refit on the whole pool.
// Labels in the aggregate are always the supervisor's, never the executed
// policy controls.
template <Environment E, typename L>
RcResult<PolicyOf<L>> rc_dagger(const E& env, const StochasticLabeler& supervisor,
                                const L& learner, const RcConfig& cfg, int horizon,
                                RandomSource& rng) {
  if (cfg.m_initial < 0) throw ConfigError("rc_dagger: m_initial must be nonnegative");
  if (cfg.m_initial == 0) throw ConfigError("rc_dagger: need at least one initial demonstration");
  if (cfg.iterations < 0) throw ConfigError("rc_dagger: iterations must be nonnegative");
  if (cfg.beta < 0.0 || cfg.beta > 1.0) throw ConfigError("rc_dagger: beta must lie in [0, 1]");
  if (!cfg.rollouts_per_iteration.empty() &&
      static_cast<int>(cfg.rollouts_per_iteration.size()) != cfg.iterations)
    throw ConfigError("rc_dagger: rollouts_per_iteration must have one entry per iteration");

  RcResult<PolicyOf<L>> out;
  CollectResult init = hc_collect(env, supervisor, cfg.m_initial, horizon, rng);
  out.data = std::move(init.data);
  out.policies.push_back(learner.fit(out.data, rng));

  auto label_at = [&](const State& s) {
    Control label = supervisor(s, rng);
    if (cfg.label_noise_std > 0.0) {
      ContinuousControl u = as_continuous(label, "rc_dagger label noise");
      u(0) += rng.normal(0.0, cfg.label_noise_std);
      u(1) += rng.normal(0.0, cfg.label_noise_std);
      label = u;
    }
    return label;
  };

  for (int k = 1; k <= cfg.iterations; ++k) {
    const int n_rollouts =
        cfg.rollouts_per_iteration.empty() ? 1 : cfg.rollouts_per_iteration[k - 1];
    const PolicyOf<L>& policy = out.policies.back();
    for (int r = 0; r < n_rollouts; ++r) {
      State x = env.sample_initial(rng);
      for (int t = 0; t < horizon; ++t) {
        Control label = label_at(x);
        const bool use_supervisor = cfg.beta > 0.0 && rng.uniform() < cfg.beta;
        Control executed = use_supervisor ? label : policy(x);
        out.data.append(x, label, Provenance{k, r});
        x = env.step(x, executed, rng);
      }
      out.data.append(x, label_at(x), Provenance{k, r});
    }
    out.policies.push_back(learner.fit(out.data, rng));
  }
  return out;
}

// Even split of a total demonstration budget into an RC run: the initial
// demos come off the top and the remainder spreads over the iterations,
// floor-even with the leftover attached to the last round. A budget equal to
// m_initial yields the empty schedule (pure initialization).
inline std::vector<int> data_equalized_schedule(int total_demos, int m_initial, int iterations) {
  if (m_initial < 0 || total_demos < m_initial)
    throw ConfigError("data_equalized_schedule: need total_demos >= m_initial >= 0");
  const int remaining = total_demos - m_initial;
  if (remaining == 0) return {};
  if (iterations < 1)
    throw ConfigError("data_equalized_schedule: leftover demos but no iterations to place them");
  std::vector<int> counts(static_cast<std::size_t>(iterations), remaining / iterations);
  counts.back() += remaining % iterations;
  return counts;
}

}  // namespace lfdbench
