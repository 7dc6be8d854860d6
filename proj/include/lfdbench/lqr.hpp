#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "lfdbench/point_mass.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

// Infinite-horizon discrete-time LQR solution for one (A, B) pair.
struct LqrGain {
  Eigen::MatrixXd K;  // control law u = -K x
  Eigen::MatrixXd P;  // cost-to-go, x' P x
  double dare_residual = 0.0;
  int iterations = 0;
};

// Riccati residual ||A'PA - P - (A'PB)(R + B'PB)^{-1}(B'PA) + Q||_inf.
inline double dare_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                            const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd BtPA = B.transpose() * P * A;
  const Eigen::MatrixXd gain_term =
      BtPA.transpose() * (R + B.transpose() * P * B).ldlt().solve(BtPA);
  const Eigen::MatrixXd res = A.transpose() * P * A - P - gain_term + Q;
  return res.cwiseAbs().maxCoeff();
}

// Fixed-point Riccati iteration from P0 = Q:
//
//   P <- Q + A'PA - (A'PB)(R + B'PB)^{-1}(B'PA)
//
// iterated until the sup-norm update falls below tol, then K = (R + B'PB)^{-1} B'PA.
// P is symmetrized every pass so the returned matrix is symmetric to roundoff.
inline LqrGain solve_lqr(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                         double tol = 1e-12, int max_iterations = 100000) {
  const auto n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n || B.rows() != n)
    throw ConfigError("solve_lqr: dimension mismatch");
  if (R.rows() != B.cols() || R.cols() != B.cols())
    throw ConfigError("solve_lqr: R must be square with B's column count");

  LqrGain out;
  Eigen::MatrixXd P = Q;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::MatrixXd BtPA = B.transpose() * P * A;
    const Eigen::MatrixXd S = R + B.transpose() * P * B;
    const auto S_ldlt = S.ldlt();
    if (S_ldlt.info() != Eigen::Success)
      throw SingularSystemError("solve_lqr: R + B'PB not positive definite");
    Eigen::MatrixXd next = Q + A.transpose() * P * A - BtPA.transpose() * S_ldlt.solve(BtPA);
    next = 0.5 * (next + next.transpose());
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    out.iterations = it;
    if (change <= tol) {
      out.P = P;
      out.K = (R + B.transpose() * P * B).ldlt().solve(B.transpose() * P * A);
      out.dare_residual = dare_residual(A, B, Q, R, P);
      return out;
    }
  }
  throw ConvergenceError("solve_lqr: fixed point not reached within max_iterations",
                         (A.transpose() * P * A - P).cwiseAbs().maxCoeff());
}

inline double spectral_radius(const Eigen::MatrixXd& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

// Point-mass supervisor: one LQR gain per mass region, switched on the
// current state's region. Goal is the origin, so the absolute state is
// already the regulation error.
class SwitchingLqrSupervisor {
 public:
  SwitchingLqrSupervisor(const PointMassEnv& env, const Eigen::Matrix4d& Q,
                         const Eigen::Matrix2d& R)
      : env_(&env),
        gain1_(solve_lqr(env.A(), env.B(env.params().mass1), Q, R)),
        gain2_(solve_lqr(env.A(), env.B(env.params().mass2), Q, R)) {}

  SwitchingLqrSupervisor(const PointMassEnv& env)
      : SwitchingLqrSupervisor(env, Eigen::Matrix4d::Identity(), Eigen::Matrix2d::Identity()) {}

  const LqrGain& gain1() const { return gain1_; }
  const LqrGain& gain2() const { return gain2_; }

  Control operator()(const State& s) const {
    const PointMassState& x = get_checked<PointMassState>(s, "SwitchingLqrSupervisor");
    const LqrGain& g = env_->in_region2(x) ? gain2_ : gain1_;
    return ContinuousControl(-g.K * x);
  }

 private:
  const PointMassEnv* env_;
  LqrGain gain1_;
  LqrGain gain2_;
};

inline void to_json(nlohmann::json& j, const LqrGain& g) {
  auto mat = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  j = nlohmann::json{{"K", mat(g.K)},
                     {"P", mat(g.P)},
                     {"dare_residual", g.dare_residual},
                     {"iterations", g.iterations}};
}

}  // namespace lfdbench
