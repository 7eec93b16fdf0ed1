#pragma once

// Minimum of W(e^t); strictly convex under the standing assumptions.

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "mirrorgamma/mirror/laurent.hpp"

namespace mirrorgamma {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConvexMinResult {
  double T = 0.0;
  Eigen::VectorXd argmin_log;
  Eigen::MatrixXd hessian;
  double gradient_norm = 0.0;
  int iterations = 0;
};

/// Damped Newton iteration from t = 0 until |grad| < grad_tol.
inline ConvexMinResult minimize_log(const LaurentPoly& W, double grad_tol = 1e-12, int max_iter = 200) {
  const int n = W.dim();
  Eigen::VectorXd t = Eigen::VectorXd::Zero(n), g, g_new;
  Eigen::MatrixXd H, H_new;
  double f = W.derivatives(t, g, H);
  int it = 0;
  for (; it < max_iter && g.norm() >= grad_tol; ++it) {
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) throw ConvergenceError("Hessian is not positive definite; check the assumptions on W");
    const Eigen::VectorXd step = -llt.solve(g);
    double alpha = 1.0;
    Eigen::VectorXd trial;
    double f_new = 0.0;
    while (true) {
      trial = t + alpha * step;
      f_new = W.derivatives(trial, g_new, H_new);
      if (f_new <= f + 1e-4 * alpha * g.dot(step) || alpha < 1e-12) break;
      alpha *= 0.5;
    }
    if (alpha < 1e-12 && g_new.norm() >= g.norm()) break;
    t = trial;
    f = f_new;
    g = g_new;
    H = H_new;
  }
  if (!(g.norm() < grad_tol)) throw ConvergenceError("Newton iteration did not reach the gradient tolerance");
  return {f, t, H, g.norm(), it};
}

}  // namespace mirrorgamma
