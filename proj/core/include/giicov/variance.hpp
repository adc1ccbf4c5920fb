#pragma once

// Sandwich variance and confidence intervals for the simulated-moment estimators.
// With Delta the moment's theta-slope, Xi the observed moment covariance, Omega
// the weighting matrix, and Lambda the moment's beta-slope, the score criterion
// uses
//
//   Sigma = (1 + 1/R) (Delta' Omega Delta)^-1 (Delta' Omega Xi Omega Delta)
//           (Delta' Omega Delta)^-1
//
// and the binding-function criterion replaces Delta by Gamma = -Lambda^-1 Delta
// and Xi by Lambda^-1 Xi Lambda^-T, the binding coefficients' own covariance.
// Standard errors are sqrt(diag(Sigma) / sample_units); intervals use the normal
// 97.5% point 1.959964.

#include <Eigen/Dense>

#include "giicov/problem.hpp"

namespace giicov {

inline constexpr double kNormal975 = 1.959964;

// How the moment's theta-slope is estimated: exact dual-number derivatives, or
// central differences with step 0.1 * sample_units^(-1/4) (overridable).
enum class JacobianScheme { ad, central_fd };

struct VarianceResult {
  Eigen::MatrixXd sigma; // asymptotic covariance of sqrt(units) * (theta_hat - theta0)
  Eigen::VectorXd se;
  Eigen::MatrixXd ci95;  // column 0 lower, column 1 upper
};

// Evaluates the sandwich at theta_hat, re-anchoring the problem there. The
// criterion kind and weighting matrix come from the problem's own options. Throws
// data_error when the bread matrix is singular (an under-identification signal).
// fd_step <= 0 selects the default step for the central_fd scheme.
VarianceResult sandwich_variance(CovProblem& problem, const Eigen::VectorXd& theta_hat,
                                 JacobianScheme scheme = JacobianScheme::ad,
                                 double fd_step = 0.0);

} // namespace giicov
