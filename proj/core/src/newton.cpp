// Newton solver and the finite-difference evaluator.

#include "giicov/newton.hpp"

#include <cmath>
#include <limits>

namespace giicov {

namespace {

Eigen::VectorXd project_box(const Eigen::VectorXd& theta, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi) {
  Eigen::VectorXd out = theta;
  for (int k = 0; k < out.size(); ++k) {
    if (out[k] < lo[k]) out[k] = lo[k];
    if (out[k] > hi[k]) out[k] = hi[k];
  }
  return out;
}

// Damped Newton direction: solves (H + lambda I) s = -g, escalating lambda tenfold
// until the factorization is positive definite and the step is a finite descent
// direction. Large enough lambda always succeeds, short of non-finite inputs.
bool solve_direction(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad,
                     Eigen::VectorXd& step) {
  const int d = static_cast<int>(grad.size());
  double lambda = 1e-8 * hess.trace() / d;
  if (!(lambda > 0.0) || !std::isfinite(lambda)) lambda = 1e-8;
  for (int attempt = 0; attempt < 60; ++attempt) {
    const Eigen::MatrixXd damped =
        hess + lambda * Eigen::MatrixXd::Identity(d, d);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      step = ldlt.solve(-grad);
      if (step.allFinite() && grad.dot(step) < 0.0) return true;
    }
    lambda *= 10.0;
  }
  return false;
}

} // namespace

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::gradient: return "gradient";
    case StopReason::stagnation: return "stagnation";
    case StopReason::line_search: return "line_search";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::non_finite: return "non_finite";
  }
  return "unknown";
}

NewtonResult newton_solve(CriterionEvaluator& f, const Eigen::VectorXd& start,
                          const NewtonOptions& opt) {
  const Eigen::VectorXd& lo = f.lower();
  const Eigen::VectorXd& hi = f.upper();
  const double grad_tol = opt.grad_tol_per_dim * f.dim();

  NewtonResult res;
  res.theta = project_box(start, lo, hi);
  res.q = std::numeric_limits<double>::infinity();

  Eigen::VectorXd current = res.theta;
  Eigen::VectorXd prev_move = Eigen::VectorXd::Zero(f.dim());
  // Initial line-search scale. Halved when consecutive accepted moves reverse
  // direction, which on re-anchored criteria signals a cycle around a point no
  // full step can land on; doubled back toward 1 when moves keep their heading.
  double alpha = 1.0;
  int last_improve_iter = 1;

  const auto finish = [&](StopReason reason) {
    res.reason = reason;
    f.anchor(res.theta);
    return res;
  };

  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    res.iterations = iter;
    f.anchor(current);
    const CriterionDerivs d = f.derivs(current);
    if (!std::isfinite(d.q) || !d.grad.allFinite() || !d.hess.allFinite()) {
      if (!std::isfinite(res.q)) {
        res.theta = current;
        res.q = d.q;
        res.grad_norm = d.grad.norm();
      }
      return finish(StopReason::non_finite);
    }
    if (d.q < res.q - opt.stall_rel_tol * (1.0 + std::abs(res.q))) {
      last_improve_iter = iter;
    }
    if (d.q < res.q) {
      res.theta = current;
      res.q = d.q;
      res.grad_norm = d.grad.norm();
    }
    if (d.grad.norm() <= grad_tol) {
      res.theta = current;
      res.q = d.q;
      res.grad_norm = d.grad.norm();
      res.converged = true;
      return finish(StopReason::gradient);
    }
    if (iter - last_improve_iter >= opt.stall_window) {
      return finish(StopReason::stagnation);
    }

    Eigen::VectorXd step;
    if (!solve_direction(d.hess, d.grad, step)) {
      return finish(StopReason::line_search);
    }

    bool accepted = false;
    double scale = alpha;
    for (int h = 0; h <= opt.max_halvings; ++h) {
      const Eigen::VectorXd trial = project_box(current + scale * step, lo, hi);
      const double qt = f.value(trial);
      if (std::isfinite(qt) && qt < d.q) {
        const Eigen::VectorXd move = trial - current;
        if (move.dot(prev_move) < 0.0) {
          alpha = std::max(0.5 * alpha, 0x1p-20);
        } else {
          alpha = std::min(2.0 * alpha, 1.0);
        }
        prev_move = move;
        current = trial;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      return finish(StopReason::line_search);
    }
  }
  res.reason = StopReason::max_iterations;
  f.anchor(res.theta);
  return res;
}

CovFdEvaluator::CovFdEvaluator(CovProblem& problem, double step)
    : p_(&problem), step_(step) {
  if (step_ <= 0.0) {
    step_ = 0.1 * std::pow(static_cast<double>(p_->sample_units()), -0.25);
  }
}

CriterionDerivs CovFdEvaluator::derivs(const Eigen::VectorXd& theta) {
  const int d = p_->theta_dim();
  const double h = step_;
  CriterionDerivs out;
  out.q = p_->value(theta);
  out.grad.resize(d);
  out.hess.resize(d, d);

  std::vector<double> vp(static_cast<std::size_t>(d));
  std::vector<double> vm(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd tp = theta;
    Eigen::VectorXd tm = theta;
    tp[k] += h;
    tm[k] -= h;
    vp[k] = p_->value(tp);
    vm[k] = p_->value(tm);
    out.grad[k] = (vp[k] - vm[k]) / (2.0 * h);
    out.hess(k, k) = (vp[k] - 2.0 * out.q + vm[k]) / (h * h);
  }
  for (int k = 0; k < d; ++k) {
    for (int l = k + 1; l < d; ++l) {
      Eigen::VectorXd tpp = theta, tpm = theta, tmp = theta, tmm = theta;
      tpp[k] += h;
      tpp[l] += h;
      tpm[k] += h;
      tpm[l] -= h;
      tmp[k] -= h;
      tmp[l] += h;
      tmm[k] -= h;
      tmm[l] -= h;
      const double cross = (p_->value(tpp) - p_->value(tpm) - p_->value(tmp) +
                            p_->value(tmm)) /
                           (4.0 * h * h);
      out.hess(k, l) = cross;
      out.hess(l, k) = cross;
    }
  }
  return out;
}

} // namespace giicov
