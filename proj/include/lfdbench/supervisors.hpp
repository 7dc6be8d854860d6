#pragma once

#include <functional>
#include <utility>

#include "lfdbench/dag.hpp"
#include "lfdbench/rng.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

// Greedy tree supervisor: L at the root and everywhere in the left subtree,
// R everywhere in the right subtree. Rolling this out yields the action
// sequence (L,L,L) on the left path and (L,R,R) after a root slip.
struct DagSupervisor {
  Control operator()(const State& s) const {
    const DagNode& n = get_checked<DagNode>(s, "DagSupervisor");
    const bool right_subtree =
        n.id == DagEnv::kR || n.id == DagEnv::kRL || n.id == DagEnv::kRR;
    return DiscreteAction{right_subtree ? kDagRight : kDagLeft};
  }
};

// Label provider that may consume randomness. Deterministic supervisors
// adapt by ignoring the stream.
using StochasticLabeler = std::function<Control(const State&, RandomSource&)>;

template <typename S>
StochasticLabeler make_labeler(S supervisor) {
  return [sup = std::move(supervisor)](const State& s, RandomSource&) { return sup(s); };
}

// Discrete label corruption: with probability flip_prob the label is replaced
// by a uniform draw over the full action set (which may repeat the true
// label). Only defined for discrete-control supervisors; continuous label
// noise lives in the sampling configuration instead.
class NoisySupervisor {
 public:
  NoisySupervisor(std::function<Control(const State&)> inner, int action_count, double flip_prob)
      : inner_(std::move(inner)), action_count_(action_count), flip_prob_(flip_prob) {
    if (action_count_ < 1) throw ConfigError("NoisySupervisor: need at least one action");
    if (flip_prob_ < 0.0 || flip_prob_ > 1.0)
      throw ConfigError("NoisySupervisor: flip_prob must lie in [0, 1]");
  }

  Control operator()(const State& s, RandomSource& rng) const {
    const Control truth = inner_(s);
    as_discrete(truth, "NoisySupervisor");  // continuous supervisors are rejected
    if (flip_prob_ > 0.0 && rng.uniform() < flip_prob_)
      return DiscreteAction{static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(action_count_)))};
    return truth;
  }

 private:
  std::function<Control(const State&)> inner_;
  int action_count_;
  double flip_prob_;
};

}  // namespace lfdbench
