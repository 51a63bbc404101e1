#pragma once

// Thin wrapper over Eigen's Levenberg-Marquardt (MINPACK port) with a
// forward-difference Jacobian.

#include <functional>

#include <Eigen/Core>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace tcac::detail {

using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;

struct LsqFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  ResidualFn fn;
  int n_in = 0, n_out = 0;

  int inputs() const { return n_in; }
  int values() const { return n_out; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    fn(x, r);
    return 0;
  }
};

/// Minimizes |r(x)|^2 from the given start; returns the final sum of squares.
inline double least_squares(const ResidualFn& fn, int n_residuals, Eigen::VectorXd& x, int max_evals = 4000) {
  LsqFunctor f{fn, static_cast<int>(x.size()), n_residuals};
  Eigen::NumericalDiff<LsqFunctor> nd(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LsqFunctor>> lm(nd);
  lm.parameters.maxfev = max_evals;
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  lm.minimize(x);
  Eigen::VectorXd r(n_residuals);
  fn(x, r);
  return r.squaredNorm();
}

}  // namespace tcac::detail
