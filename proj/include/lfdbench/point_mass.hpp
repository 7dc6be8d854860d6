#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "lfdbench/rng.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

// Planar point mass with discrete-time double-integrator dynamics and a mass
// switch in the far upper-right quadrant:
//
//   x_{t+1} = A x_t + B(x_t) u_t + w_t,   w_t ~ N(0, noise_variance * I4)
//
// A couples position to the pre-update velocity (dt = 1); B scales force by
// 1/m with m = mass1 in region 1 and m = mass2 in region 2 (x > boundary AND
// y > boundary, both strict).
class PointMassEnv {
 public:
  struct Params {
    double mass1 = 1.0;
    double mass2 = 4.0;
    double boundary = 12.0;
    double noise_variance = 0.1;  // per-component variance of w
    Eigen::Vector4d start{-15.0, -10.0, 0.0, 0.0};
  };

  PointMassEnv() : PointMassEnv(Params{}) {}

  explicit PointMassEnv(const Params& p) : p_(p) {
    if (p_.mass1 <= 0.0 || p_.mass2 <= 0.0) throw ConfigError("PointMassEnv: masses must be positive");
    if (p_.noise_variance < 0.0) throw ConfigError("PointMassEnv: noise variance must be nonnegative");
    noise_std_ = std::sqrt(p_.noise_variance);
    A_.setIdentity();
    A_(0, 2) = 1.0;
    A_(1, 3) = 1.0;
  }

  const Params& params() const { return p_; }
  const Eigen::Matrix4d& A() const { return A_; }

  Eigen::Matrix<double, 4, 2> B(double mass) const {
    Eigen::Matrix<double, 4, 2> b = Eigen::Matrix<double, 4, 2>::Zero();
    b(2, 0) = 1.0 / mass;
    b(3, 1) = 1.0 / mass;
    return b;
  }

  bool in_region2(const PointMassState& x) const {
    return x(0) > p_.boundary && x(1) > p_.boundary;
  }

  double mass_at(const PointMassState& x) const {
    return in_region2(x) ? p_.mass2 : p_.mass1;
  }

  // The start state is deterministic; noise enters through the dynamics only.
  State sample_initial(RandomSource&) const { return PointMassState(p_.start); }

  State step(const State& s, const Control& u, RandomSource& rng) const {
    const PointMassState& x = get_checked<PointMassState>(s, "PointMassEnv::step");
    if (!x.allFinite())
      throw NonFiniteStateError("PointMassEnv::step: non-finite state (diverging policy)");
    const ContinuousControl& f = as_continuous(u, "PointMassEnv::step");
    if (!f.allFinite())
      throw NonFiniteStateError("PointMassEnv::step: non-finite control (diverging policy)");
    PointMassState next = A_ * x + B(mass_at(x)) * f;
    if (noise_std_ > 0.0)
      for (int i = 0; i < 4; ++i) next(i) += rng.normal(0.0, noise_std_);
    return next;
  }

 private:
  Params p_;
  double noise_std_;
  Eigen::Matrix4d A_;
};

}  // namespace lfdbench
