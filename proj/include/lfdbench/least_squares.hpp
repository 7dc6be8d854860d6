#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lfdbench/rng.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

// Affine control law u = M x + b over point-mass states.
class AffinePolicy {
 public:
  AffinePolicy(Eigen::Matrix<double, 2, 4> M, Eigen::Vector2d b) : M_(std::move(M)), b_(std::move(b)) {}

  const Eigen::Matrix<double, 2, 4>& M() const { return M_; }
  const Eigen::Vector2d& b() const { return b_; }

  Control operator()(const State& s) const {
    const PointMassState& x = get_checked<PointMassState>(s, "AffinePolicy");
    return ContinuousControl(M_ * x + b_);
  }

 private:
  Eigen::Matrix<double, 2, 4> M_;
  Eigen::Vector2d b_;
};

// Ridge least squares on augmented states (x, 1):
//
//   min_W sum_i ||W' z_i - u_i||^2 + ridge ||W||_F^2,   z = (x, 1)
//
// solved through the normal equations. ridge = 0 is accepted only when the
// Gram matrix is full rank; otherwise the error says to use a nonzero ridge.
struct LeastSquaresLearner {
  double ridge = 1e-6;

  AffinePolicy fit(const Dataset& data, RandomSource& = dummy_rng()) const {
    if (data.empty()) throw EmptyDatasetError("least squares: empty dataset");
    if (ridge < 0.0) throw ConfigError("least squares: ridge must be nonnegative");
    Eigen::Matrix<double, 5, 5> G = Eigen::Matrix<double, 5, 5>::Zero();
    Eigen::Matrix<double, 5, 2> ZtU = Eigen::Matrix<double, 5, 2>::Zero();
    for (const auto& item : data.items) {
      const PointMassState& x = get_checked<PointMassState>(item.state, "least squares");
      const ContinuousControl& u = as_continuous(item.label, "least squares");
      Eigen::Matrix<double, 5, 1> z;
      z << x, 1.0;
      G.noalias() += z * z.transpose();
      ZtU.noalias() += z * u.transpose();
    }
    if (!G.allFinite() || !ZtU.allFinite())
      throw SingularSystemError("least squares: non-finite normal equations (states overflowed)");
    G += ridge * Eigen::Matrix<double, 5, 5>::Identity();
    if (ridge == 0.0) {
      const Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(G);
      if (!lu.isInvertible())
        throw SingularSystemError(
            "least squares: singular normal equations with ridge 0; use a nonzero ridge");
    }
    const Eigen::Matrix<double, 5, 2> W = G.ldlt().solve(ZtU);
    if (!W.allFinite())
      throw SingularSystemError("least squares: solve produced non-finite coefficients");
    return AffinePolicy(W.topRows<4>().transpose(), W.row(4).transpose());
  }

 private:
  static RandomSource& dummy_rng() {
    static RandomSource r(0);
    return r;
  }
};

inline void to_json(nlohmann::json& j, const AffinePolicy& p) {
  nlohmann::json m = nlohmann::json::array();
  for (int r = 0; r < 2; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 4; ++c) row.push_back(p.M()(r, c));
    m.push_back(row);
  }
  j = nlohmann::json{{"type", "affine"}, {"M", m}, {"b", {p.b()(0), p.b()(1)}}};
}

inline AffinePolicy affine_policy_from_json(const nlohmann::json& j) {
  Eigen::Matrix<double, 2, 4> M;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) M(r, c) = j.at("M").at(r).at(c).get<double>();
  return AffinePolicy(M, {j.at("b").at(0).get<double>(), j.at("b").at(1).get<double>()});
}

}  // namespace lfdbench
