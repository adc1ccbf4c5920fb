// Sandwich variance assembly. All pieces are evaluated at theta_hat with the
// problem anchored there, so the moment Jacobian is the derivative of the smooth
// representative at its own anchor, the object the asymptotics describe.

#include "giicov/variance.hpp"

#include <cmath>

#include "giicov/errors.hpp"

namespace giicov {

namespace {

Eigen::MatrixXd invert_or_throw(const Eigen::MatrixXd& a, const char* label) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw data_error(std::string(label) + " is singular: model under-identified "
                     "by the auxiliary statistic at theta_hat");
  }
  return lu.inverse();
}

} // namespace

VarianceResult sandwich_variance(CovProblem& problem, const Eigen::VectorXd& theta_hat,
                                 JacobianScheme scheme, double fd_step) {
  problem.set_anchor(theta_hat);

  Eigen::MatrixXd delta;
  if (scheme == JacobianScheme::ad) {
    delta = problem.moment_jacobian_ad(theta_hat);
  } else {
    const double step =
        fd_step > 0.0
            ? fd_step
            : 0.1 * std::pow(static_cast<double>(problem.sample_units()), -0.25);
    delta = problem.moment_jacobian_fd(theta_hat, step);
  }

  const Eigen::MatrixXd& omega = problem.omega();
  const Eigen::MatrixXd& xi = problem.xi_hat();

  // The score criterion's slope is Delta itself; the binding criterion's slope is
  // Gamma = -Lambda^-1 Delta with the moment covariance mapped through Lambda^-1.
  Eigen::MatrixXd slope, mid;
  if (problem.options().criterion == CriterionKind::lm) {
    slope = delta;
    mid = xi;
  } else {
    const Eigen::MatrixXd lambda = problem.beta_jacobian_fd(theta_hat);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lambda);
    if (!lu.isInvertible()) {
      throw data_error("moment beta-slope is singular: auxiliary design degenerate "
                       "at theta_hat");
    }
    slope = -lu.solve(delta);
    const Eigen::MatrixXd xl = lu.solve(xi);
    mid = lu.solve(xl.transpose()).transpose();
    mid = 0.5 * (mid + mid.transpose().eval());
  }

  const Eigen::MatrixXd os = omega * slope;
  const Eigen::MatrixXd bread = invert_or_throw(slope.transpose() * os, "bread matrix");
  const Eigen::MatrixXd meat = os.transpose() * mid * os;
  const double scale = 1.0 + 1.0 / static_cast<double>(problem.options().replications);

  VarianceResult out;
  out.sigma = scale * bread * meat * bread;
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose().eval());
  const int d = static_cast<int>(theta_hat.size());
  out.se.resize(d);
  out.ci95.resize(d, 2);
  const double units = static_cast<double>(problem.sample_units());
  for (int k = 0; k < d; ++k) {
    out.se[k] = std::sqrt(std::max(out.sigma(k, k), 0.0) / units);
    out.ci95(k, 0) = theta_hat[k] - kNormal975 * out.se[k];
    out.ci95(k, 1) = theta_hat[k] + kNormal975 * out.se[k];
  }
  return out;
}

} // namespace giicov
