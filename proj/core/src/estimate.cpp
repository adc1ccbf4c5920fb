// Method dispatch. Every branch produces the same result record so the Monte
// Carlo harness and the CLI can treat methods interchangeably.

#include "giicov/estimate.hpp"

#include <chrono>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "giicov/errors.hpp"

namespace giicov {

namespace {

constexpr int kScanPointsPerDim = 8;

Eigen::VectorXd grid_scan(const std::function<double(const Eigen::VectorXd&)>& fn,
                          const ModelInfo& info) {
  const int d = info.theta_dim;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd th(d);
  Eigen::VectorXd best(d);
  double best_f = std::numeric_limits<double>::infinity();
  bool found = false;
  while (true) {
    for (int k = 0; k < d; ++k) {
      const double frac = (idx[k] + 0.5) / kScanPointsPerDim;
      th[k] = info.lower[k] + frac * (info.upper[k] - info.lower[k]);
    }
    const double f = fn(th);
    if (std::isfinite(f) && f < best_f) {
      best_f = f;
      best = th;
      found = true;
    }
    int k = 0;
    while (k < d && ++idx[k] == kScanPointsPerDim) {
      idx[k] = 0;
      ++k;
    }
    if (k == d) break;
  }
  if (!found) {
    throw data_error("grid scan found no feasible starting point");
  }
  return best;
}

} // namespace

MethodKind method_from_name(const std::string& name) {
  if (name == "giicov") return MethodKind::giicov;
  if (name == "giicov-fd") return MethodKind::giicov_fd;
  if (name == "gii1") return MethodKind::gii1;
  if (name == "gii2") return MethodKind::gii2;
  if (name == "nelder-mead") return MethodKind::nelder_mead;
  throw config_error("unknown method '" + name +
                     "' (known: giicov, giicov-fd, gii1, gii2, nelder-mead)");
}

const char* method_name(MethodKind method) {
  switch (method) {
    case MethodKind::giicov: return "giicov";
    case MethodKind::giicov_fd: return "giicov-fd";
    case MethodKind::gii1: return "gii1";
    case MethodKind::gii2: return "gii2";
    case MethodKind::nelder_mead: return "nelder-mead";
  }
  return "unknown";
}

EstimationResult estimate(ModelKind kind, const PanelData& data,
                          const EstimateOptions& opt, const Eigen::VectorXd* start) {
  const auto t_begin = std::chrono::steady_clock::now();
  const ModelInfo& info = model_info(kind);

  CovProblem p(kind, data, opt.problem);

  const bool smooth_method =
      opt.method == MethodKind::gii1 || opt.method == MethodKind::gii2;
  std::unique_ptr<SmoothProblem> sp;
  if (smooth_method) {
    ProblemOptions popt = opt.problem;
    double lambda0 = opt.gii1_bandwidth;
    if (opt.method == MethodKind::gii2) {
      popt.replications = std::max(opt.problem.replications, opt.gii2_replications);
      lambda0 = opt.gii2_bandwidth1;
    }
    sp = std::make_unique<SmoothProblem>(kind, data, popt, lambda0);
    if (opt.method == MethodKind::gii2) {
      sp->use_replications(opt.problem.replications);
    }
  }

  std::function<double(const Eigen::VectorXd&)> objective;
  if (smooth_method) {
    objective = [&sp](const Eigen::VectorXd& th) { return sp->value(th); };
  } else {
    objective = [&p](const Eigen::VectorXd& th) { return p.anchored_value(th); };
  }

  Eigen::VectorXd th0;
  if (start != nullptr) {
    if (start->size() != info.theta_dim) {
      throw config_error("start for " + info.name + " must have " +
                         std::to_string(info.theta_dim) + " components");
    }
    th0 = start->cwiseMax(info.lower).cwiseMin(info.upper);
  } else {
    th0 = grid_scan(objective, info);
  }

  EstimationResult res;
  res.model = info.name;
  res.method = method_name(opt.method);

  switch (opt.method) {
    case MethodKind::giicov: {
      CovAdEvaluator ev(p, opt.full_hessian);
      const NewtonResult nr = newton_solve(ev, th0, opt.newton);
      res.theta = nr.theta;
      res.q = nr.q;
      res.grad_norm = nr.grad_norm;
      res.iterations = nr.iterations;
      res.converged = nr.converged;
      res.stop_reason = stop_reason_name(nr.reason);
      break;
    }
    case MethodKind::giicov_fd: {
      CovFdEvaluator ev(p, opt.fd_step);
      const NewtonResult nr = newton_solve(ev, th0, opt.newton);
      res.theta = nr.theta;
      res.q = nr.q;
      res.grad_norm = nr.grad_norm;
      res.iterations = nr.iterations;
      res.converged = nr.converged;
      res.stop_reason = stop_reason_name(nr.reason);
      break;
    }
    case MethodKind::gii1: {
      const QuasiNewtonResult qr =
          bfgs_minimize(objective, th0, info.lower, info.upper, opt.quasi);
      res.theta = qr.x;
      res.q = qr.f;
      res.grad_norm = qr.grad_norm;
      res.iterations = qr.iterations;
      res.converged = qr.converged;
      res.stop_reason = stop_reason_name(qr.reason);
      break;
    }
    case MethodKind::gii2: {
      const QuasiNewtonResult s1 =
          bfgs_minimize(objective, th0, info.lower, info.upper, opt.quasi);
      sp->set_bandwidth(opt.gii2_bandwidth2);
      sp->use_replications(opt.gii2_replications);
      const QuasiNewtonResult s2 =
          bfgs_minimize(objective, s1.x, info.lower, info.upper, opt.quasi);
      res.theta = s2.x;
      res.q = s2.f;
      res.grad_norm = s2.grad_norm;
      res.iterations = s1.iterations + s2.iterations;
      res.converged = s2.converged;
      res.stop_reason = stop_reason_name(s2.reason);
      break;
    }
    case MethodKind::nelder_mead: {
      const NelderMeadResult nm = nelder_mead_minimize(objective, th0, opt.simplex);
      res.theta = nm.x;
      res.q = nm.f;
      res.iterations = nm.evaluations;
      res.converged = false;
      res.stop_reason =
          nm.diameter <= opt.simplex.diameter_tol ? "simplex_diameter" : "eval_budget";
      p.set_anchor(nm.x);
      res.grad_norm = p.derivs(nm.x, false).grad.norm();
      break;
    }
  }

  if (opt.compute_se) {
    const VarianceResult v =
        sandwich_variance(p, res.theta, opt.variance_scheme, opt.variance_fd_step);
    res.se = v.se;
    res.ci95 = v.ci95;
  }

  const auto t_end = std::chrono::steady_clock::now();
  res.elapsed_seconds = std::chrono::duration<double>(t_end - t_begin).count();
  return res;
}

} // namespace giicov
