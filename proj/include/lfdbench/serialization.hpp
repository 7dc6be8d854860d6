#pragma once

#include <functional>
#include <nlohmann/json.hpp>
#include <string>

#include "lfdbench/decision_tree.hpp"
#include "lfdbench/least_squares.hpp"
#include "lfdbench/linear_classifier.hpp"
#include "lfdbench/majority_vote.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

inline nlohmann::json state_to_json(const State& s) {
  if (const auto* g = std::get_if<GridCell>(&s))
    return {{"kind", "grid"}, {"col", g->col}, {"row", g->row}};
  if (const auto* p = std::get_if<PointMassState>(&s))
    return {{"kind", "pointmass"}, {"x", (*p)(0)}, {"y", (*p)(1)}, {"vx", (*p)(2)}, {"vy", (*p)(3)}};
  return {{"kind", "dag"}, {"node", std::get<DagNode>(s).id}};
}

inline State state_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "grid") return GridCell{j.at("col").get<int>(), j.at("row").get<int>()};
  if (kind == "pointmass")
    return PointMassState(j.at("x").get<double>(), j.at("y").get<double>(), j.at("vx").get<double>(),
                          j.at("vy").get<double>());
  if (kind == "dag") return DagNode{j.at("node").get<int>()};
  throw ConfigError("state JSON: unknown kind '" + kind + "'");
}

inline nlohmann::json control_to_json(const Control& u) {
  if (const auto* d = std::get_if<DiscreteAction>(&u))
    return {{"kind", "discrete"}, {"index", d->index}};
  const ContinuousControl& c = std::get<ContinuousControl>(u);
  return {{"kind", "continuous"}, {"fx", c(0)}, {"fy", c(1)}};
}

inline Control control_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "discrete") return DiscreteAction{j.at("index").get<int>()};
  if (kind == "continuous")
    return ContinuousControl(j.at("fx").get<double>(), j.at("fy").get<double>());
  throw ConfigError("control JSON: unknown kind '" + kind + "'");
}

inline nlohmann::json dataset_to_json(const Dataset& d) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : d.items)
    items.push_back({{"state", state_to_json(item.state)},
                     {"control", control_to_json(item.label)},
                     {"iteration", item.prov.iteration},
                     {"demo", item.prov.demo_index}});
  const bool discrete =
      d.items.empty() || std::holds_alternative<DiscreteAction>(d.items.front().label);
  return {{"control_kind", discrete ? "discrete" : "continuous"}, {"items", items}};
}

inline Dataset dataset_from_json(const nlohmann::json& j) {
  Dataset d;
  try {
    for (const auto& item : j.at("items"))
      d.append(state_from_json(item.at("state")), control_from_json(item.at("control")),
               Provenance{item.value("iteration", 0), item.value("demo", 0)});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("dataset JSON: ") + e.what());
  }
  return d;
}

// Load any serialized policy as a plain state-to-control callable, dispatched
// on the "type" tag the policy writers emit.
inline std::function<Control(const State&)> policy_from_json(const nlohmann::json& j) {
  const std::string type = j.value("type", "");
  try {
    if (type == "linear_classifier") return linear_policy_from_json(j);
    if (type == "decision_tree") return tree_policy_from_json(j);
    if (type == "affine") return affine_policy_from_json(j);
    if (type == "constant") return constant_policy_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("policy JSON: ") + e.what());
  }
  throw ConfigError("policy JSON: unknown type '" + type + "'");
}

}  // namespace lfdbench
