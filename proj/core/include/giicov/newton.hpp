#pragma once

// Newton-Raphson over anchored criteria. Each iterate re-anchors the objective at
// the current point, pulls derivatives there, and line-searches the damped Newton
// direction while the anchor stays fixed, so every comparison inside one iteration
// is between values of the same smooth function.
//
// Convergence is declared on the gradient norm at the freshly re-anchored point,
// which is the estimator's first-order condition. Criteria built from simulated
// discrete outcomes keep a sampling-scale floor under that norm: between outcome
// flips the re-anchored value is locally constant in theta, so the smooth
// surrogate's gradient cannot be driven to zero no matter how many steps are
// taken. The solver therefore also watches the re-anchored value itself and stops
// once it has not improved across a window of iterations, returning the best
// iterate seen with converged = false and reason = stagnation.

#include <Eigen/Dense>

#include "giicov/problem.hpp"

namespace giicov {

// Objective seen by the solver. anchor() fixes the smooth representative the
// subsequent value and derivs calls evaluate; implementations without an anchoring
// notion make it a no-op.
class CriterionEvaluator {
public:
  virtual ~CriterionEvaluator() = default;
  virtual int dim() const = 0;
  virtual const Eigen::VectorXd& lower() const = 0;
  virtual const Eigen::VectorXd& upper() const = 0;
  virtual void anchor(const Eigen::VectorXd& theta) = 0;
  virtual double value(const Eigen::VectorXd& theta) const = 0;
  virtual CriterionDerivs derivs(const Eigen::VectorXd& theta) = 0;
};

struct NewtonOptions {
  int max_iter = 200;
  // Converged when the gradient norm is at or below this times the dimension.
  double grad_tol_per_dim = 1e-8;
  int max_halvings = 30;
  // Stop when the best re-anchored value has not improved by a relative
  // _rel_tol within the last _window iterations.
  int stall_window = 20;
  double stall_rel_tol = 1e-11;
};

// Why the iteration ended. Only a gradient stop certifies the first-order
// condition at the solver's tolerance; stagnation means the iterates reached the
// criterion's resolution floor and the best point seen was returned.
enum class StopReason {
  gradient,
  stagnation,
  line_search,
  max_iterations,
  non_finite,
};

const char* stop_reason_name(StopReason reason);

struct NewtonResult {
  Eigen::VectorXd theta;
  double q = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  StopReason reason = StopReason::max_iterations;
};

// Minimizes the evaluator's criterion inside its box. Starts are clamped into the
// box; iterates stay inside it. theta, q, and grad_norm describe the iterate with
// the lowest re-anchored value seen, and the evaluator is left anchored there.
NewtonResult newton_solve(CriterionEvaluator& f, const Eigen::VectorXd& start,
                          const NewtonOptions& opt = {});

// Exact-derivative evaluator over a CovProblem. full_hessian selects the complete
// second order (second derivatives of the criterion vector included); otherwise
// the Hessian is the Gauss-Newton surrogate.
class CovAdEvaluator final : public CriterionEvaluator {
public:
  CovAdEvaluator(CovProblem& problem, bool full_hessian)
      : p_(&problem), full_(full_hessian) {}

  int dim() const override { return p_->theta_dim(); }
  const Eigen::VectorXd& lower() const override { return p_->info().lower; }
  const Eigen::VectorXd& upper() const override { return p_->info().upper; }
  void anchor(const Eigen::VectorXd& theta) override { p_->set_anchor(theta); }
  double value(const Eigen::VectorXd& theta) const override { return p_->value(theta); }
  CriterionDerivs derivs(const Eigen::VectorXd& theta) override {
    return p_->derivs(theta, full_);
  }

private:
  CovProblem* p_;
  bool full_;
};

// Same anchored criterion, but gradient and Hessian both come from central finite
// differences of value() at the fixed anchor (the full difference stencil: 2d
// gradient evaluations, 2d diagonal and 4*C(d,2) cross terms for the Hessian).
class CovFdEvaluator final : public CriterionEvaluator {
public:
  // step <= 0 selects the default 0.1 * sample_units^(-1/4).
  CovFdEvaluator(CovProblem& problem, double step = 0.0);

  int dim() const override { return p_->theta_dim(); }
  const Eigen::VectorXd& lower() const override { return p_->info().lower; }
  const Eigen::VectorXd& upper() const override { return p_->info().upper; }
  void anchor(const Eigen::VectorXd& theta) override { p_->set_anchor(theta); }
  double value(const Eigen::VectorXd& theta) const override { return p_->value(theta); }
  CriterionDerivs derivs(const Eigen::VectorXd& theta) override;

  double step() const { return step_; }

private:
  CovProblem* p_;
  double step_;
};

} // namespace giicov
