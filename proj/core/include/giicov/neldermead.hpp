#pragma once

// Derivative-free simplex minimizer with the standard reflection, expansion,
// contraction, and shrink coefficients (1, 2, 0.5, 0.5). The objective is a plain
// callable, so re-anchored criteria plug in by fixing the anchor inside each
// evaluation. Non-finite values are treated as +infinity and the simplex retreats
// from them, which doubles as the box handling: callers reject out-of-bound points
// by returning a non-finite value.

#include <functional>

#include <Eigen/Dense>

namespace giicov {

struct NelderMeadOptions {
  // Stop once the largest pairwise infinity-norm distance between vertices falls
  // to this.
  double diameter_tol = 1e-6;
  // Evaluation budget as a multiple of the dimension.
  int evals_per_dim = 500;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int evaluations = 0;
  double diameter = 0.0;
};

// Minimizes fn starting from a simplex around x0 (each coordinate displaced by 5%
// of its magnitude, or 2.5e-4 when zero). Always returns the best vertex seen.
NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& fn,
    const Eigen::VectorXd& x0, const NelderMeadOptions& opt = {});

} // namespace giicov
