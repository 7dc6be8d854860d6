#pragma once

#include <nlohmann/json.hpp>

#include "lfdbench/dag.hpp"
#include "lfdbench/rng.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

// Constant policy: the same binary action at every state.
class ConstantPolicy {
 public:
  explicit ConstantPolicy(int action) : action_(action) {}

  int action() const { return action_; }

  Control operator()(const State&) const { return DiscreteAction{action_}; }

 private:
  int action_;
};

// Majority vote over binary labels: R wins only on a strict majority, so a
// tied count falls back to L.
struct MajorityVoteLearner {
  ConstantPolicy fit(const Dataset& data, RandomSource& = dummy_rng()) const {
    if (data.empty()) throw EmptyDatasetError("majority vote: empty dataset");
    long count_l = 0;
    long count_r = 0;
    for (const auto& item : data.items) {
      const DiscreteAction& a = as_discrete(item.label, "majority vote");
      if (a.index == kDagLeft)
        ++count_l;
      else if (a.index == kDagRight)
        ++count_r;
      else
        throw ConfigError("majority vote: label outside {L, R}");
    }
    return ConstantPolicy(count_r > count_l ? kDagRight : kDagLeft);
  }

 private:
  static RandomSource& dummy_rng() {
    static RandomSource r(0);
    return r;
  }
};

inline void to_json(nlohmann::json& j, const ConstantPolicy& p) {
  j = nlohmann::json{{"type", "constant"}, {"action", p.action() == kDagRight ? "R" : "L"}};
}

inline ConstantPolicy constant_policy_from_json(const nlohmann::json& j) {
  const std::string a = j.at("action").get<std::string>();
  if (a != "L" && a != "R") throw ConfigError("constant policy JSON: action must be L or R");
  return ConstantPolicy(a == "R" ? kDagRight : kDagLeft);
}

}  // namespace lfdbench
