#pragma once

#include <array>
#include <string>

#include "lfdbench/rng.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

// Binary actions of the tree walk.
enum DagAction : int {
  kDagLeft = 0,
  kDagRight = 1,
};
inline constexpr int kDagActionCount = 2;

// Depth-2 binary tree walked root -> child -> grandchild (decision steps
// t = 0, 1, 2; a rollout uses horizon 2). The only stochastic transition is
// at the root: commanding L still lands on the right child with probability
// mu, while commanding R lands right surely. Below the root, L and R move to
// the left and right child deterministically.
class DagEnv {
 public:
  enum Node : int { kRoot = 0, kL = 1, kR = 2, kLL = 3, kLR = 4, kRL = 5, kRR = 6 };
  static constexpr int kNodeCount = 7;

  explicit DagEnv(double mu) : mu_(mu) {
    if (mu_ < 0.0 || mu_ > 0.25)
      throw ConfigError("DagEnv: mu must lie in [0, 1/4]");
  }

  double mu() const { return mu_; }

  static bool is_leaf(DagNode n) { return n.id >= kLL; }

  static const char* name(DagNode n) {
    static constexpr std::array<const char*, kNodeCount> kNames = {
        "root", "l", "r", "ll", "lr", "rl", "rr"};
    return kNames.at(static_cast<std::size_t>(n.id));
  }

  State sample_initial(RandomSource&) const { return DagNode{kRoot}; }

  State step(const State& s, const Control& u, RandomSource& rng) const {
    const DagNode& n = get_checked<DagNode>(s, "DagEnv::step");
    if (n.id < 0 || n.id >= kNodeCount) throw ConfigError("DagEnv::step: bad node id");
    if (is_leaf(n))
      throw ConfigError(std::string("DagEnv::step: cannot step from leaf ") + name(n));
    const DiscreteAction& a = as_discrete(u, "DagEnv::step");
    if (a.index != kDagLeft && a.index != kDagRight)
      throw ConfigError("DagEnv::step: action must be L or R");
    if (n.id == kRoot) {
      const bool right = (a.index == kDagRight) || rng.uniform() < mu_;
      return DagNode{right ? kR : kL};
    }
    const int base = n.id == kL ? kLL : kRL;
    return DagNode{base + (a.index == kDagRight ? 1 : 0)};
  }

 private:
  double mu_;
};

}  // namespace lfdbench
