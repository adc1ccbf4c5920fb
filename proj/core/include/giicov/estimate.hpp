#pragma once

// One entry point that runs any of the estimation procedures on a dataset and
// returns a uniform result record: the exact-derivative Newton solver, its
// finite-difference twin, the kernel-smoothed criterion under a quasi-Newton
// search (single bandwidth or a two-step schedule), and the derivative-free
// simplex baseline.

#include <string>

#include <Eigen/Dense>

#include "giicov/models.hpp"
#include "giicov/neldermead.hpp"
#include "giicov/newton.hpp"
#include "giicov/problem.hpp"
#include "giicov/smooth.hpp"
#include "giicov/variance.hpp"

namespace giicov {

enum class MethodKind { giicov, giicov_fd, gii1, gii2, nelder_mead };

MethodKind method_from_name(const std::string& name); // throws config_error
const char* method_name(MethodKind method);

struct EstimateOptions {
  MethodKind method = MethodKind::giicov;
  ProblemOptions problem;
  NewtonOptions newton;
  QuasiNewtonOptions quasi;
  NelderMeadOptions simplex;

  // giicov: full second-order duals instead of the Gauss-Newton Hessian.
  bool full_hessian = false;
  // giicov_fd: central-difference step; <= 0 selects 0.1 * units^(-1/4).
  double fd_step = 0.0;

  double gii1_bandwidth = 0.08;
  double gii2_bandwidth1 = 0.03;
  double gii2_bandwidth2 = 0.003;
  int gii2_replications = 300;

  bool compute_se = true;
  JacobianScheme variance_scheme = JacobianScheme::ad;
  double variance_fd_step = 0.0;
};

struct EstimationResult {
  std::string model;
  std::string method;
  Eigen::VectorXd theta;
  double q = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  Eigen::VectorXd se;    // empty when standard errors were not requested
  Eigen::MatrixXd ci95;  // column 0 lower, column 1 upper
  double elapsed_seconds = 0.0;
};

// Runs the selected method on the dataset. start == nullptr triggers a coarse
// grid scan over the parameter box (8 interior points per dimension) on the
// method's own objective; an explicit start is clamped into the box. Standard
// errors always come from the sandwich at theta_hat, whatever method produced it.
EstimationResult estimate(ModelKind kind, const PanelData& data,
                          const EstimateOptions& opt,
                          const Eigen::VectorXd* start = nullptr);

} // namespace giicov
