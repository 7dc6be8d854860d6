#pragma once

#include <concepts>
#include <utility>

#include "lfdbench/rng.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

template <typename E>
concept Environment = requires(const E& env, RandomSource& rng, const State& s, const Control& u) {
  { env.sample_initial(rng) } -> std::same_as<State>;
  { env.step(s, u, rng) } -> std::same_as<State>;
};

// Anything mapping a state to a control; stochastic policies close over their
// own RandomSource.
template <typename P>
concept PolicyLike = requires(P& pol, const State& s) {
  { pol(s) } -> std::convertible_to<Control>;
};

// Run a policy for `horizon` steps from a sampled initial state. The returned
// trajectory has horizon + 1 pairs; the control recorded at index t is exactly
// policy(state_t), and the final state's control is recorded without being
// executed.
template <Environment E, PolicyLike P>
Trajectory rollout(const E& env, P&& policy, int horizon, RandomSource& rng) {
  if (horizon < 0) throw ConfigError("rollout: horizon must be nonnegative");
  Trajectory traj;
  traj.horizon = horizon;
  traj.pairs.reserve(static_cast<std::size_t>(horizon) + 1);
  State x = env.sample_initial(rng);
  for (int t = 0; t < horizon; ++t) {
    Control u = policy(x);
    State next = env.step(x, u, rng);
    traj.pairs.emplace_back(std::move(x), std::move(u));
    x = std::move(next);
  }
  traj.pairs.emplace_back(x, policy(x));
  return traj;
}

// Surrogate loss between two controls: 0/1 disagreement for discrete actions,
// squared Euclidean distance for continuous controls. Mixing the two kinds is
// a wiring error.
inline double surrogate_loss(const Control& a, const Control& b) {
  if (a.index() != b.index())
    throw VariantMismatchError("surrogate_loss: cannot compare discrete with continuous controls");
  if (const auto* da = std::get_if<DiscreteAction>(&a))
    return (*da == std::get<DiscreteAction>(b)) ? 0.0 : 1.0;
  return (std::get<ContinuousControl>(a) - std::get<ContinuousControl>(b)).squaredNorm();
}

// Total surrogate loss of `policy` against `reference` over the states of a
// trajectory. Both callables must be deterministic for the sum to mean
// anything; the reference is usually the exact supervisor.
template <PolicyLike P, PolicyLike R>
double trajectory_loss(P&& policy, R&& reference, const Trajectory& traj) {
  double total = 0.0;
  for (const auto& [s, u] : traj.pairs) {
    (void)u;
    total += surrogate_loss(policy(s), reference(s));
  }
  return total;
}

}  // namespace lfdbench
