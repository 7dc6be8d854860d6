#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lfdbench {

// ---------------------------------------------------------------------------
// Errors. Everything thrown by the library derives from Error so callers can
// fence off library failures from genuine bugs.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Policy output (or supervisor label) does not match what the environment or
// learner expects; signals a mis-wired experiment.
struct VariantMismatchError : Error {
  using Error::Error;
};

// A continuous state overflowed (diverging policy).
struct NonFiniteStateError : Error {
  using Error::Error;
};

// An iterative solver ran out of sweeps before meeting its tolerance.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual(residual) {}
  double residual;
};

struct ConfigError : Error {
  using Error::Error;
};

struct EmptyDatasetError : Error {
  using Error::Error;
};

struct SingularSystemError : Error {
  using Error::Error;
};

struct ZeroVarianceError : Error {
  using Error::Error;
};

struct ZeroBaselineError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// States and controls. A State is a tagged value covering the three
// environments; a Control covers the two control spaces. Wiring errors show
// up as VariantMismatchError at runtime rather than silent reinterpretation.
// ---------------------------------------------------------------------------

struct GridCell {
  int col = 0;
  int row = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

using PointMassState = Eigen::Vector4d;  // (x, y, vx, vy)

struct DagNode {
  int id = 0;
  friend bool operator==(const DagNode&, const DagNode&) = default;
};

using State = std::variant<GridCell, PointMassState, DagNode>;

struct DiscreteAction {
  int index = 0;  // position in the environment's fixed action order
  friend bool operator==(const DiscreteAction&, const DiscreteAction&) = default;
};

using ContinuousControl = Eigen::Vector2d;

using Control = std::variant<DiscreteAction, ContinuousControl>;

template <typename T>
const T& get_checked(const State& s, const char* who) {
  if (const T* p = std::get_if<T>(&s)) return *p;
  throw VariantMismatchError(std::string(who) + ": state variant does not match this environment");
}

inline const DiscreteAction& as_discrete(const Control& u, const char* who) {
  if (const DiscreteAction* p = std::get_if<DiscreteAction>(&u)) return *p;
  throw VariantMismatchError(std::string(who) + ": expected a discrete action");
}

inline const ContinuousControl& as_continuous(const Control& u, const char* who) {
  if (const ContinuousControl* p = std::get_if<ContinuousControl>(&u)) return *p;
  throw VariantMismatchError(std::string(who) + ": expected a continuous control");
}

inline bool state_equal(const State& a, const State& b) {
  if (a.index() != b.index()) return false;
  if (const auto* g = std::get_if<GridCell>(&a)) return *g == std::get<GridCell>(b);
  if (const auto* p = std::get_if<PointMassState>(&a))
    return (p->array() == std::get<PointMassState>(b).array()).all();
  return std::get<DagNode>(a) == std::get<DagNode>(b);
}

inline bool control_equal(const Control& a, const Control& b) {
  if (a.index() != b.index()) return false;
  if (const auto* d = std::get_if<DiscreteAction>(&a)) return *d == std::get<DiscreteAction>(b);
  return (std::get<ContinuousControl>(a).array() == std::get<ContinuousControl>(b).array()).all();
}

// ---------------------------------------------------------------------------
// Trajectories and datasets.
// ---------------------------------------------------------------------------

// One rollout: horizon + 1 (state, control) pairs; the control at index t is
// the one chosen at state t (the final pair's control is recorded, not
// executed).
struct Trajectory {
  std::vector<std::pair<State, Control>> pairs;
  int horizon = 0;

  std::size_t size() const { return pairs.size(); }
};

// Where a dataset item came from: demo_index counts initial demonstrations,
// iteration 0 marks initial demos and k >= 1 the k-th aggregation round.
struct Provenance {
  int iteration = 0;
  int demo_index = 0;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Append-only pool of labeled states with per-item provenance. Every item
// carries equal weight when a learner consumes the pool.
struct Dataset {
  struct Item {
    State state;
    Control label;
    Provenance prov;
  };

  std::vector<Item> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }

  void append(State s, Control u, Provenance p) {
    items.push_back(Item{std::move(s), std::move(u), p});
  }

  void append_trajectory(const Trajectory& traj, Provenance p) {
    for (const auto& [s, u] : traj.pairs) items.push_back(Item{s, u, p});
  }
};

}  // namespace lfdbench
