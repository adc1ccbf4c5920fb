#pragma once

// Kernel-smoothed simulated criterion for the binary panel family, plus the
// quasi-Newton minimizer used on it. Every indicator 1[s > 0] inside the
// simulation is replaced by the normal CDF Phi(s / lambda), so simulated outcomes
// and the criterion become smooth in theta and central finite differences give
// usable derivatives. The observed-side fit, the weighting matrix, and the uniform
// draws are built exactly as in the change-of-variables problem, so both methods
// see common random numbers.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "giicov/aux_sur.hpp"
#include "giicov/data.hpp"
#include "giicov/models.hpp"
#include "giicov/newton.hpp"
#include "giicov/problem.hpp"

namespace giicov {

// One unit's smoothed binary path. The latent recursion matches the hard
// simulator: index alpha * y_{t-1} + gamma * x_t + rho * v with v the accumulated
// normal shock; the outcome Phi((index + shock) / lambda) replaces the indicator
// and feeds back into the next period's lag slot.
void binary_panel_unit_smoothed(double gamma, double alpha, double rho, const double* x,
                                int t_len, const double* u, double lambda, double* y);

// Smoothed criterion over a binary panel dataset. Construction mirrors CovProblem
// (observed fit, weight matrix, frozen draws); value() simulates smoothed paths
// and assembles the same score or binding criterion with the smoothed outcomes in
// both the response and the lagged-regressor slots. Throws config_error for models
// outside the binary panel family.
class SmoothProblem {
public:
  SmoothProblem(ModelKind kind, const PanelData& data, const ProblemOptions& opt,
                double lambda);

  const ModelInfo& info() const { return *info_; }
  int theta_dim() const { return info_->theta_dim; }
  int sample_units() const { return kappa_; }

  double bandwidth() const { return lambda_; }
  void set_bandwidth(double lambda);

  // Restricts evaluation to the first r of the replications drawn at
  // construction, so a two-step schedule can reuse one problem and keep the
  // stage-one draws a prefix of the stage-two draws.
  int replications_in_use() const { return r_used_; }
  void use_replications(int r);

  // Criterion at theta; +infinity outside the model's valid set.
  double value(const Eigen::VectorXd& theta) const;

private:
  const ModelInfo* info_;
  ProblemOptions opt_;
  double lambda_;
  int r_used_;

  SurDesign sur_;
  Eigen::VectorXd beta_hat_;
  Eigen::MatrixXd omega_;
  int d_m_ = 0;
  int kappa_ = 0;

  int n_paths_ = 0;
  int t_sim_ = 0;
  int pre_len_ = 0;

  std::vector<UniformPanel> u_main_;
  std::vector<std::vector<double>> x_pre_;
  std::vector<std::vector<double>> x_obs_;
};

struct QuasiNewtonOptions {
  int max_iter = 200;
  // Converged when the gradient norm is at or below this times the dimension.
  double grad_tol_per_dim = 1e-8;
  int max_halvings = 30;
  // Central-difference step per component: fd_scale * (1 + |x_k|).
  double fd_scale = 1e-5;
};

struct QuasiNewtonResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  StopReason reason = StopReason::max_iterations;
};

// BFGS with central-difference gradients and a backtracking line search, iterates
// projected into the box. Monotone descent, so the returned point is the best one
// seen. converged is true only when the gradient tolerance was met.
QuasiNewtonResult bfgs_minimize(const std::function<double(const Eigen::VectorXd&)>& fn,
                                const Eigen::VectorXd& start, const Eigen::VectorXd& lower,
                                const Eigen::VectorXd& upper,
                                const QuasiNewtonOptions& opt = {});

} // namespace giicov
