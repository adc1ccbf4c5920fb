// Smoothed-criterion assembly and the BFGS minimizer used on it. Simulation and
// moment assembly deliberately follow the same loop order and stream layout as the
// change-of-variables problem so the two criteria share draws.

#include "giicov/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "giicov/errors.hpp"
#include "giicov/normal.hpp"

namespace giicov {

void binary_panel_unit_smoothed(double gamma, double alpha, double rho, const double* x,
                                int t_len, const double* u, double lambda, double* y) {
  double v = 0.0;
  double lag = 0.0;
  for (int t = 0; t < t_len; ++t) {
    const double idx = alpha * lag + (gamma * x[t] + rho * v);
    const double shock = inv_normal_cdf(u[t]);
    y[t] = normal_cdf((idx + shock) / lambda);
    lag = y[t];
    v = rho * v + shock;
  }
}

SmoothProblem::SmoothProblem(ModelKind kind, const PanelData& data,
                             const ProblemOptions& opt, double lambda)
    : info_(&model_info(kind)), opt_(opt), lambda_(lambda), r_used_(opt.replications) {
  if (kind != ModelKind::binary_ar && kind != ModelKind::dynamic_binary &&
      kind != ModelKind::dynamic_binary_window) {
    throw config_error("smoothed criterion is only available for the binary panel models");
  }
  if (opt_.replications < 1) {
    throw config_error("replications must be at least 1");
  }
  if (!(lambda_ > 0.0)) {
    throw config_error("bandwidth must be positive");
  }

  if (data.n_units() < 2) {
    throw data_error(info_->name + ": need at least 2 units");
  }
  if (data.n_x != 1) {
    throw data_error(info_->name + ": expected exactly one covariate column, got " +
                     std::to_string(data.n_x));
  }
  if (!data.has_uniform_window(data.times[0])) {
    throw data_error(info_->name + ": units must share one observation window");
  }
  pre_len_ = info_->first_observed_period - 1;
  const int observed_t = static_cast<int>(data.times[0].size());
  t_sim_ = pre_len_ + observed_t;
  n_paths_ = data.n_units();

  sur_ = SurDesign::panel(data, 1);
  d_m_ = sur_.d_beta();
  kappa_ = sur_.n_blocks();
  beta_hat_ = sur_.fit();

  if (opt_.weight == WeightScheme::identity) {
    omega_ = Eigen::MatrixXd::Identity(d_m_, d_m_);
  } else {
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(d_m_, d_m_);
    std::vector<double> yb;
    for (int b = 0; b < sur_.n_blocks(); ++b) {
      yb.resize(static_cast<std::size_t>(sur_.rows_in_block(b)));
      for (int k = 0; k < sur_.rows_in_block(b); ++k) yb[k] = sur_.y_obs(b, k);
      const Eigen::VectorXd mb = sur_.moment_block(b, yb.data(), beta_hat_);
      xi += mb * mb.transpose();
    }
    xi /= static_cast<double>(kappa_);
    xi += 1e-10 * Eigen::MatrixXd::Identity(d_m_, d_m_);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xi);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw data_error("efficient weight: observed moment covariance is not positive definite");
    }
    omega_ = ldlt.solve(Eigen::MatrixXd::Identity(d_m_, d_m_));
    omega_ = 0.5 * (omega_ + omega_.transpose().eval());
  }

  x_obs_.resize(static_cast<std::size_t>(n_paths_));
  for (int i = 0; i < n_paths_; ++i) {
    x_obs_[i].assign(static_cast<std::size_t>(t_sim_), 0.0);
    for (int k = 0; k < observed_t; ++k) {
      x_obs_[i][static_cast<std::size_t>(pre_len_ + k)] = data.x[i][k][0];
    }
  }

  const int R = opt_.replications;
  u_main_.reserve(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r) {
    const SeedSpec main_seed{opt_.master_seed, opt_.mc_replication,
                             stream_role::for_replication(stream_role::sim_shock, r)};
    u_main_.emplace_back(main_seed, n_paths_, t_sim_, 1);
    if (pre_len_ > 0) {
      const SeedSpec x_seed{opt_.master_seed, opt_.mc_replication,
                            stream_role::for_replication(stream_role::sim_x, r)};
      const UniformPanel ux(x_seed, n_paths_, pre_len_, 1);
      std::vector<double> xp(static_cast<std::size_t>(n_paths_) * pre_len_);
      for (int i = 0; i < n_paths_; ++i) {
        for (int t = 0; t < pre_len_; ++t) {
          xp[static_cast<std::size_t>(i) * pre_len_ + t] = x_from_uniform(ux(i, t, 0));
        }
      }
      x_pre_.push_back(std::move(xp));
    }
  }
}

void SmoothProblem::set_bandwidth(double lambda) {
  if (!(lambda > 0.0)) {
    throw config_error("bandwidth must be positive");
  }
  lambda_ = lambda;
}

void SmoothProblem::use_replications(int r) {
  if (r < 1 || r > opt_.replications) {
    throw config_error("replications in use must lie in [1, " +
                       std::to_string(opt_.replications) + "]");
  }
  r_used_ = r;
}

double SmoothProblem::value(const Eigen::VectorXd& theta) const {
  if (theta.size() != info_->theta_dim) {
    throw contract_error("theta dimension mismatch");
  }
  try {
    validate_theta(info_->kind, theta);
  } catch (const std::invalid_argument&) {
    return std::numeric_limits<double>::infinity();
  }
  const double gamma = theta[0];
  const double alpha = info_->theta_dim == 3 ? theta[1] : 0.0;
  const double rho = theta[info_->theta_dim == 3 ? 2 : 1];

  const bool wald = opt_.criterion == CriterionKind::wald;
  const int R = r_used_;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(d_m_);
  Eigen::VectorXd binding = Eigen::VectorXd::Zero(d_m_);
  Eigen::MatrixXd gram;
  Eigen::VectorXd zy;

  std::vector<double> x(static_cast<std::size_t>(t_sim_));
  std::vector<double> u(static_cast<std::size_t>(t_sim_));
  std::vector<double> y(static_cast<std::size_t>(t_sim_));
  double zt[4];
  for (int r = 0; r < R; ++r) {
    if (wald) {
      gram = Eigen::MatrixXd::Zero(d_m_, d_m_);
      zy = Eigen::VectorXd::Zero(d_m_);
    }
    const UniformPanel& um = u_main_[r];
    for (int i = 0; i < n_paths_; ++i) {
      for (int t = 0; t < t_sim_; ++t) x[t] = x_obs_[i][t];
      for (int t = 0; t < pre_len_; ++t) {
        x[t] = x_pre_[r][static_cast<std::size_t>(i) * pre_len_ + t];
      }
      for (int t = 0; t < t_sim_; ++t) u[t] = um(i, t, 0);
      binary_panel_unit_smoothed(gamma, alpha, rho, x.data(), t_sim_, u.data(), lambda_,
                                 y.data());
      for (int k = 0; k < sur_.rows_in_block(i); ++k) {
        const int sim_t = pre_len_ + sur_.row_period(i, k);
        const double resp = y[sim_t];
        const int off = sur_.eq_offset(i, k);
        const int wd = sur_.eq_width(i, k);
        zt[0] = 1.0;
        zt[1] = x[sim_t];
        if (wd == 4) {
          zt[2] = x[sim_t - 1];
          zt[3] = y[sim_t - 1];
        }
        if (wald) {
          for (int q = 0; q < wd; ++q) {
            zy[off + q] += resp * zt[q];
            for (int p = 0; p < wd; ++p) gram(off + q, off + p) += zt[q] * zt[p];
          }
        } else {
          double resid = resp;
          for (int q = 0; q < wd; ++q) resid -= zt[q] * beta_hat_[off + q];
          for (int q = 0; q < wd; ++q) m[off + q] += resid * zt[q];
        }
      }
    }
    if (wald) {
      for (int k = 0; k < sur_.rows_in_block(0); ++k) {
        const int off = sur_.eq_offset(0, k);
        const int wd = sur_.eq_width(0, k);
        Eigen::MatrixXd g = gram.block(off, off, wd, wd);
        g.diagonal().array() += 1e-10;
        binding.segment(off, wd) +=
            g.ldlt().solve(zy.segment(off, wd)) / static_cast<double>(R);
      }
    }
  }

  Eigen::VectorXd crit;
  if (wald) {
    crit = binding - beta_hat_;
  } else {
    crit = m / (static_cast<double>(kappa_) * R);
  }
  return crit.dot(omega_ * crit);
}

namespace {

Eigen::VectorXd project_into_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

bool fd_gradient(const std::function<double(const Eigen::VectorXd&)>& fn,
                 const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                 const Eigen::VectorXd& upper, double fd_scale, Eigen::VectorXd& g) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd xp = x;
  Eigen::VectorXd xm = x;
  for (int k = 0; k < d; ++k) {
    const double h = fd_scale * (1.0 + std::abs(x[k]));
    xp[k] = std::min(x[k] + h, upper[k]);
    xm[k] = std::max(x[k] - h, lower[k]);
    const double span = xp[k] - xm[k];
    if (span <= 0.0) return false;
    const double fp = fn(xp);
    const double fm = fn(xm);
    if (!std::isfinite(fp) || !std::isfinite(fm)) return false;
    g[k] = (fp - fm) / span;
    xp[k] = x[k];
    xm[k] = x[k];
  }
  return true;
}

} // namespace

QuasiNewtonResult bfgs_minimize(const std::function<double(const Eigen::VectorXd&)>& fn,
                                const Eigen::VectorXd& start, const Eigen::VectorXd& lower,
                                const Eigen::VectorXd& upper,
                                const QuasiNewtonOptions& opt) {
  const int d = static_cast<int>(start.size());
  QuasiNewtonResult res;
  res.x = project_into_box(start, lower, upper);
  res.f = fn(res.x);
  if (!std::isfinite(res.f)) {
    res.reason = StopReason::non_finite;
    return res;
  }
  const double grad_tol = opt.grad_tol_per_dim * d;

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd g(d), g_prev, s_prev;
  bool have_pair = false;
  bool scaled = false;
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    res.iterations = iter;
    if (!fd_gradient(fn, res.x, lower, upper, opt.fd_scale, g)) {
      res.reason = StopReason::non_finite;
      return res;
    }
    res.grad_norm = g.norm();
    if (res.grad_norm <= grad_tol) {
      res.converged = true;
      res.reason = StopReason::gradient;
      return res;
    }

    if (have_pair) {
      const Eigen::VectorXd ydiff = g - g_prev;
      const double sy = s_prev.dot(ydiff);
      if (sy > 1e-12 * s_prev.norm() * ydiff.norm()) {
        if (!scaled) {
          h_inv = (sy / ydiff.squaredNorm()) * Eigen::MatrixXd::Identity(d, d);
          scaled = true;
        }
        const Eigen::VectorXd hy = h_inv * ydiff;
        const double yhy = ydiff.dot(hy);
        h_inv += ((sy + yhy) / (sy * sy)) * (s_prev * s_prev.transpose());
        h_inv -= (hy * s_prev.transpose() + s_prev * hy.transpose()) / sy;
      }
    }

    Eigen::VectorXd dir = -(h_inv * g);
    if (!(dir.dot(g) < 0.0)) {
      h_inv = Eigen::MatrixXd::Identity(d, d);
      scaled = false;
      dir = -g;
    }

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_next;
    double f_next = 0.0;
    for (int halve = 0; halve <= opt.max_halvings; ++halve) {
      x_next = project_into_box(res.x + alpha * dir, lower, upper);
      const Eigen::VectorXd step = x_next - res.x;
      if (step.norm() == 0.0) break;
      f_next = fn(x_next);
      const double slope = std::min(g.dot(step), 0.0);
      if (std::isfinite(f_next) && f_next <= res.f + 1e-4 * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.reason = StopReason::line_search;
      return res;
    }
    s_prev = x_next - res.x;
    g_prev = g;
    have_pair = true;
    res.x = x_next;
    res.f = f_next;
  }
  res.reason = StopReason::max_iterations;
  return res;
}

} // namespace giicov
