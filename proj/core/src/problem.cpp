// Implementation of the criterion assembler. One accumulation kernel is templated
// over the scalar type (double for values, dual types for derivatives) and the
// simulation policy (direct, recording, or change of variables), so every
// evaluation mode runs arithmetic that is op-for-op identical in the value
// component. That keeps value(theta) and the value part of derivs(theta) bitwise
// equal, which the line search in the optimizer relies on.

#include "giicov/problem.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "giicov/aux_mixture.hpp"
#include "giicov/cov.hpp"
#include "giicov/dual.hpp"
#include "giicov/errors.hpp"

namespace giicov {

namespace {

// Panel paths live in fixed stack buffers of this many periods.
constexpr int kMaxPanelPeriods = 16;

template <class S>
std::array<S, kMaxParamDim> to_scalars(const Eigen::VectorXd& theta) {
  std::array<S, kMaxParamDim> out{};
  const int d = static_cast<int>(theta.size());
  for (int i = 0; i < d; ++i) {
    if constexpr (std::is_same_v<S, double>) {
      out[i] = theta[i];
    } else {
      out[i] = S::variable(theta[i], i, d);
    }
  }
  return out;
}

} // namespace

CovProblem::CovProblem(ModelKind kind, const PanelData& data, const ProblemOptions& opt)
    : info_(&model_info(kind)), opt_(opt) {
  if (opt_.replications < 1) {
    throw config_error("replications must be at least 1");
  }

  switch (kind) {
    case ModelKind::binary_ar:
    case ModelKind::dynamic_binary:
    case ModelKind::dynamic_binary_window:
      family_ = Family::panel;
      break;
    case ModelKind::ordered_probit:
      family_ = Family::panel;
      ordered_ = true;
      break;
    case ModelKind::exp_ar:
      family_ = Family::series_exp;
      break;
    case ModelKind::gg1_queue:
      family_ = Family::series_queue;
      break;
  }

  if (family_ == Family::panel) {
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
    if (pre_len_ > 0) {
      std::vector<int> expected;
      for (int t = info_->first_observed_period; t <= info_->default_t; ++t) {
        expected.push_back(t);
      }
      if (!data.has_uniform_window(expected)) {
        throw data_error(info_->name + ": observation window must be periods " +
                         std::to_string(expected.front()) + ".." +
                         std::to_string(expected.back()));
      }
    }
    const int observed_t = static_cast<int>(data.times[0].size());
    t_sim_ = pre_len_ + observed_t;
    if (t_sim_ > kMaxPanelPeriods) {
      throw data_error(info_->name + ": at most " +
                       std::to_string(kMaxPanelPeriods - pre_len_) + " periods supported");
    }
    n_paths_ = data.n_units();
    sur_ = SurDesign::panel(data, ordered_ ? 2 : 1);
    d_m_ = sur_.d_beta();
    kappa_ = sur_.n_blocks();
    beta_hat_ = sur_.fit();

    x_obs_.resize(static_cast<std::size_t>(n_paths_));
    for (int i = 0; i < n_paths_; ++i) {
      x_obs_[i].assign(static_cast<std::size_t>(t_sim_), 0.0);
      for (int k = 0; k < observed_t; ++k) {
        x_obs_[i][static_cast<std::size_t>(pre_len_ + k)] = data.x[i][k][0];
      }
    }
  } else if (family_ == Family::series_exp) {
    sur_ = SurDesign::pooled_ar(data);
    d_m_ = sur_.d_beta();
    kappa_ = sur_.n_blocks();
    beta_hat_ = sur_.fit();
    t_sim_ = static_cast<int>(data.times[0].size());
    n_paths_ = 1;
  } else {
    if (data.n_units() != 1) {
      throw data_error("gg1_queue: expected a single unit holding one row per customer");
    }
    t_sim_ = static_cast<int>(data.y[0].size());
    if (t_sim_ < 2) {
      throw data_error("gg1_queue: need at least 2 customers");
    }
    mixture_ = true;
    beta_hat_ = fit_mixture_em(data.y[0]);
    d_m_ = kMixtureDim;
    kappa_ = t_sim_;
    n_paths_ = 1;
  }

  if (opt_.criterion == CriterionKind::wald && family_ != Family::panel) {
    throw config_error("wald criterion is only available for the panel models");
  }

  // Observed moment covariance, one contribution per independent sampling unit.
  xi_hat_ = Eigen::MatrixXd::Zero(d_m_, d_m_);
  if (mixture_) {
    std::array<double, kMixtureDim> mm{};
    Eigen::VectorXd mv(kMixtureDim);
    for (int i = 0; i < t_sim_; ++i) {
      mixture_moments(beta_hat_, data.y[0][i], mm.data());
      for (int q = 0; q < kMixtureDim; ++q) mv[q] = mm[q];
      xi_hat_ += mv * mv.transpose();
    }
  } else {
    std::vector<double> yb;
    for (int b = 0; b < sur_.n_blocks(); ++b) {
      yb.resize(static_cast<std::size_t>(sur_.rows_in_block(b)));
      for (int k = 0; k < sur_.rows_in_block(b); ++k) yb[k] = sur_.y_obs(b, k);
      const Eigen::VectorXd mb = sur_.moment_block(b, yb.data(), beta_hat_);
      xi_hat_ += mb * mb.transpose();
    }
  }
  xi_hat_ /= static_cast<double>(kappa_);

  if (opt_.weight == WeightScheme::identity) {
    omega_ = Eigen::MatrixXd::Identity(d_m_, d_m_);
  } else {
    const Eigen::MatrixXd ridged =
        xi_hat_ + 1e-10 * Eigen::MatrixXd::Identity(d_m_, d_m_);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(ridged);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw data_error("efficient weight: observed moment covariance is not positive definite");
    }
    omega_ = ldlt.solve(Eigen::MatrixXd::Identity(d_m_, d_m_));
    omega_ = 0.5 * (omega_ + omega_.transpose().eval());
  }

  // Simulation draws, frozen for the life of the problem. Stream roles are strided
  // by replication so path r sees the same draws whatever the total R is.
  const int R = opt_.replications;
  u_main_.reserve(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r) {
    const SeedSpec main_seed{opt_.master_seed, opt_.mc_replication,
                             stream_role::for_replication(stream_role::sim_shock, r)};
    const SeedSpec aux_seed{opt_.master_seed, opt_.mc_replication,
                            stream_role::for_replication(stream_role::sim_aux, r)};
    if (family_ == Family::panel) {
      u_main_.emplace_back(main_seed, n_paths_, t_sim_, 1);
      if (ordered_) {
        u_aux_.emplace_back(aux_seed, n_paths_, 1, 1);
      }
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
    } else {
      u_main_.emplace_back(main_seed, 1, t_sim_, 1);
      u_aux_.emplace_back(aux_seed, 1, t_sim_, 1);
    }
  }
}

template <class S, class PolicyFactory>
void CovProblem::accumulate(const S* th, PolicyFactory&& pf, const Eigen::VectorXd* beta,
                            S* m, WaldScratch<S>* wald) const {
  const int R = opt_.replications;
  switch (family_) {
    case Family::panel: {
      std::array<double, kMaxPanelPeriods> x{};
      std::array<double, kMaxPanelPeriods> u{};
      std::array<double, kMaxPanelPeriods> y{};
      std::array<S, kMaxPanelPeriods> w;
      std::array<double, 4> zt{};
      std::array<S, 2> delta;
      S gamma(0.0), alpha(0.0), rho(0.0), sigma(0.0);
      if (ordered_) {
        delta[0] = th[0];
        delta[1] = th[1];
        gamma = th[2];
        sigma = th[3];
      } else if (info_->theta_dim == 3) {
        gamma = th[0];
        alpha = th[1];
        rho = th[2];
      } else {
        gamma = th[0];
        rho = th[1];
      }
      for (int r = 0; r < R; ++r) {
        const UniformPanel& um = u_main_[r];
        for (int i = 0; i < n_paths_; ++i) {
          for (int t = 0; t < t_sim_; ++t) x[t] = x_obs_[i][t];
          for (int t = 0; t < pre_len_; ++t) {
            x[t] = x_pre_[r][static_cast<std::size_t>(i) * pre_len_ + t];
          }
          for (int t = 0; t < t_sim_; ++t) u[t] = um(i, t, 0);
          auto pol = pf(i * R + r);
          if (ordered_) {
            ordered_probit_unit(delta.data(), 2, gamma, sigma, x.data(), t_sim_,
                                u_aux_[r](i, 0, 0), u.data(), pol, y.data(), w.data());
          } else {
            binary_panel_unit(gamma, alpha, rho, x.data(), t_sim_, u.data(), pol,
                              y.data(), w.data());
          }
          for (int k = 0; k < sur_.rows_in_block(i); ++k) {
            const int sim_t = pre_len_ + sur_.row_period(i, k);
            const int lvl = sur_.row_level(i, k);
            const double resp =
                lvl == 0 ? y[sim_t] : (y[sim_t] == static_cast<double>(lvl) ? 1.0 : 0.0);
            const int off = sur_.eq_offset(i, k);
            const int wd = sur_.eq_width(i, k);
            // The simulated row's regressors: intercept and covariates keep their
            // observed values, the lagged outcome is the simulated path's own
            // previous-period outcome, mirroring how the observed fit uses the
            // sample's own lag.
            zt[0] = 1.0;
            zt[1] = x[sim_t];
            if (wd == 4) {
              zt[2] = x[sim_t - 1];
              zt[3] = y[sim_t - 1];
            }
            if (wald) {
              Eigen::MatrixXd& g = wald->gram[r];
              std::vector<S>& zy = wald->zy[r];
              const S wr = w[sim_t] * resp;
              for (int q = 0; q < wd; ++q) {
                zy[off + q] = zy[off + q] + wr * zt[q];
                for (int p = 0; p < wd; ++p) g(off + q, off + p) += zt[q] * zt[p];
              }
            } else {
              double resid = resp;
              if (beta) {
                double zb = 0.0;
                for (int q = 0; q < wd; ++q) zb += zt[q] * (*beta)[off + q];
                resid -= zb;
              }
              const S term = w[sim_t] * resid;
              for (int q = 0; q < wd; ++q) m[off + q] = m[off + q] + term * zt[q];
            }
          }
        }
      }
      break;
    }
    case Family::series_exp: {
      if (beta == nullptr) {
        throw contract_error("series moment assembly requires auxiliary coefficients");
      }
      const S mu = th[0];
      const S phi = th[1];
      const double b0 = (*beta)[0];
      const double b1 = (*beta)[1];
      std::vector<S> y(static_cast<std::size_t>(t_sim_));
      std::vector<S> w(static_cast<std::size_t>(t_sim_));
      std::vector<double> u1(static_cast<std::size_t>(t_sim_));
      std::vector<double> u2(static_cast<std::size_t>(t_sim_));
      for (int r = 0; r < R; ++r) {
        for (int t = 0; t < t_sim_; ++t) {
          u1[t] = u_main_[r](0, t, 0);
          u2[t] = u_aux_[r](0, t, 0);
        }
        auto pol = pf(r);
        exp_ar_path(mu, phi, t_sim_, u1.data(), u2.data(), pol, y.data(), w.data());
        S cumw = w[0];
        for (int t = 1; t < t_sim_; ++t) {
          cumw = cumw * w[t];
          const S resid = y[t] - (b0 + b1 * y[t - 1]);
          const S term = resid * cumw;
          m[0] = m[0] + term;
          m[1] = m[1] + y[t - 1] * term;
        }
      }
      break;
    }
    case Family::series_queue: {
      if (beta == nullptr) {
        throw contract_error("series moment assembly requires auxiliary coefficients");
      }
      const S tv = th[0];
      const S tw = th[1];
      std::vector<S> y(static_cast<std::size_t>(t_sim_));
      std::vector<S> w(static_cast<std::size_t>(t_sim_));
      std::vector<double> us(static_cast<std::size_t>(t_sim_));
      std::vector<double> ua(static_cast<std::size_t>(t_sim_));
      std::array<S, kMixtureDim> mm;
      for (int r = 0; r < R; ++r) {
        for (int i = 0; i < t_sim_; ++i) {
          us[i] = u_main_[r](0, i, 0);
          ua[i] = u_aux_[r](0, i, 0);
        }
        auto pol = pf(r);
        gg1_queue_path(tv, tw, t_sim_, us.data(), ua.data(), pol, y.data(), w.data());
        S cumw(1.0);
        for (int i = 0; i < t_sim_; ++i) {
          cumw = cumw * w[i];
          mixture_moments(*beta, y[i], mm.data());
          for (int q = 0; q < kMixtureDim; ++q) m[q] = m[q] + mm[q] * cumw;
        }
      }
      break;
    }
  }
}

template <class S, class PolicyFactory>
void CovProblem::criterion_vector(const Eigen::VectorXd& theta, PolicyFactory&& pf,
                                  CriterionKind crit, const Eigen::VectorXd& beta,
                                  std::vector<S>& out) const {
  const auto th = to_scalars<S>(theta);
  std::vector<S> m(static_cast<std::size_t>(d_m_), S(0.0));
  const int R = opt_.replications;
  out.resize(static_cast<std::size_t>(d_m_));
  if (crit == CriterionKind::lm) {
    accumulate(th.data(), pf, &beta, m.data());
    const double scale = 1.0 / (static_cast<double>(kappa_) * R);
    for (int a = 0; a < d_m_; ++a) out[a] = m[a] * scale;
  } else {
    // Binding-function comparison: each replication's regression of its simulated
    // responses on its own design, averaged across replications, minus the
    // observed fit. The normal equations pair the unweighted instrument Gram with
    // weighted response cross moments, so parameter dependence enters only
    // through the responses and their weights.
    WaldScratch<S> ws;
    ws.gram.assign(static_cast<std::size_t>(R), Eigen::MatrixXd::Zero(d_m_, d_m_));
    ws.zy.assign(static_cast<std::size_t>(R),
                 std::vector<S>(static_cast<std::size_t>(d_m_), S(0.0)));
    accumulate(th.data(), pf, static_cast<const Eigen::VectorXd*>(nullptr),
               static_cast<S*>(nullptr), &ws);
    for (int a = 0; a < d_m_; ++a) out[a] = S(0.0);
    const double inv_r = 1.0 / static_cast<double>(R);
    const int n_eq = sur_.rows_in_block(0);
    for (int r = 0; r < R; ++r) {
      for (int k = 0; k < n_eq; ++k) {
        const int off = sur_.eq_offset(0, k);
        const int wd = sur_.eq_width(0, k);
        Eigen::MatrixXd g = ws.gram[r].block(off, off, wd, wd);
        g.diagonal().array() += 1e-10;
        const Eigen::MatrixXd gi = g.ldlt().solve(Eigen::MatrixXd::Identity(wd, wd));
        for (int q = 0; q < wd; ++q) {
          S acc(0.0);
          for (int p = 0; p < wd; ++p) acc = acc + gi(q, p) * ws.zy[r][off + p];
          out[off + q] = out[off + q] + acc * inv_r;
        }
      }
    }
    for (int a = 0; a < d_m_; ++a) out[a] = out[a] - beta_hat_[a];
  }
}

template <class S>
void CovProblem::cov_vector(const Eigen::VectorXd& theta, CriterionKind crit,
                            const Eigen::VectorXd& beta, std::vector<S>& out) const {
  require_anchor();
  criterion_vector<S>(
      theta,
      [this](int idx) {
        return CovPolicy<S>{&caches_[static_cast<std::size_t>(idx)], 0};
      },
      crit, beta, out);
}

template <class S>
S CovProblem::quad_form(const std::vector<S>& v) const {
  S q(0.0);
  for (int a = 0; a < d_m_; ++a) {
    S acc(0.0);
    for (int b = 0; b < d_m_; ++b) acc = acc + omega_(a, b) * v[b];
    q = q + v[a] * acc;
  }
  return q;
}

void CovProblem::require_anchor() const {
  if (!anchored_) {
    throw contract_error("CovProblem: set_anchor must be called before evaluation");
  }
}

void CovProblem::set_anchor(const Eigen::VectorXd& theta_star) {
  validate_theta(info_->kind, theta_star);
  caches_.assign(static_cast<std::size_t>(n_paths_) * opt_.replications, AnchorCache{});
  const auto th = to_scalars<double>(theta_star);
  std::vector<double> m(static_cast<std::size_t>(d_m_), 0.0);
  accumulate(
      th.data(),
      [this](int idx) {
        AnchorCache& c = caches_[static_cast<std::size_t>(idx)];
        c.grids.reserve(static_cast<std::size_t>(t_sim_));
        return DirectPolicy{&c};
      },
      &beta_hat_, m.data());
  anchor_ = theta_star;
  anchored_ = true;
}

double CovProblem::value(const Eigen::VectorXd& theta) const {
  require_anchor();
  try {
    validate_theta(info_->kind, theta);
  } catch (const std::invalid_argument&) {
    return std::numeric_limits<double>::infinity();
  }
  std::vector<double> v;
  cov_vector<double>(theta, opt_.criterion, beta_hat_, v);
  return quad_form(v);
}

double CovProblem::anchored_value(const Eigen::VectorXd& theta) const {
  try {
    validate_theta(info_->kind, theta);
  } catch (const std::invalid_argument&) {
    return std::numeric_limits<double>::infinity();
  }
  std::vector<double> v;
  criterion_vector<double>(
      theta, [](int) { return DirectPolicy{}; }, opt_.criterion, beta_hat_, v);
  return quad_form(v);
}

CriterionDerivs CovProblem::derivs(const Eigen::VectorXd& theta, bool full_hessian) const {
  require_anchor();
  validate_theta(info_->kind, theta);
  const int d = theta_dim();
  CriterionDerivs out;
  out.grad.resize(d);
  out.hess.resize(d, d);
  if (full_hessian) {
    std::vector<Dual2> v;
    cov_vector<Dual2>(theta, opt_.criterion, beta_hat_, v);
    const Dual2 q = quad_form(v);
    out.q = q.v;
    for (int i = 0; i < d; ++i) out.grad[i] = q.g[i];
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) out.hess(i, j) = q.hess(i, j);
    }
  } else {
    std::vector<Dual1> v;
    cov_vector<Dual1>(theta, opt_.criterion, beta_hat_, v);
    std::vector<double> vals(static_cast<std::size_t>(d_m_));
    Eigen::VectorXd ev(d_m_);
    Eigen::MatrixXd jac(d_m_, d);
    for (int a = 0; a < d_m_; ++a) {
      vals[a] = v[a].v;
      ev[a] = v[a].v;
      for (int k = 0; k < d; ++k) jac(a, k) = v[a].g[k];
    }
    out.q = quad_form(vals);
    out.grad = 2.0 * jac.transpose() * (omega_ * ev);
    out.hess = 2.0 * jac.transpose() * omega_ * jac;
  }
  return out;
}

Eigen::VectorXd CovProblem::moment_value(const Eigen::VectorXd& theta) const {
  std::vector<double> v;
  cov_vector<double>(theta, CriterionKind::lm, beta_hat_, v);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), d_m_);
}

Eigen::MatrixXd CovProblem::moment_jacobian_ad(const Eigen::VectorXd& theta) const {
  std::vector<Dual1> v;
  cov_vector<Dual1>(theta, CriterionKind::lm, beta_hat_, v);
  const int d = theta_dim();
  Eigen::MatrixXd jac(d_m_, d);
  for (int a = 0; a < d_m_; ++a) {
    for (int k = 0; k < d; ++k) jac(a, k) = v[a].g[k];
  }
  return jac;
}

Eigen::MatrixXd CovProblem::moment_jacobian_fd(const Eigen::VectorXd& theta,
                                               double step) const {
  const int d = theta_dim();
  Eigen::MatrixXd jac(d_m_, d);
  std::vector<double> vp, vm;
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd tp = theta;
    Eigen::VectorXd tm = theta;
    tp[k] += step;
    tm[k] -= step;
    cov_vector<double>(tp, CriterionKind::lm, beta_hat_, vp);
    cov_vector<double>(tm, CriterionKind::lm, beta_hat_, vm);
    for (int a = 0; a < d_m_; ++a) jac(a, k) = (vp[a] - vm[a]) / (2.0 * step);
  }
  return jac;
}

Eigen::MatrixXd CovProblem::beta_jacobian_fd(const Eigen::VectorXd& theta) const {
  const int db = static_cast<int>(beta_hat_.size());
  Eigen::MatrixXd lam(d_m_, db);
  std::vector<double> vp, vm;
  for (int k = 0; k < db; ++k) {
    const double h = 1e-6 * (1.0 + std::abs(beta_hat_[k]));
    Eigen::VectorXd bp = beta_hat_;
    Eigen::VectorXd bm = beta_hat_;
    bp[k] += h;
    bm[k] -= h;
    cov_vector<double>(theta, CriterionKind::lm, bp, vp);
    cov_vector<double>(theta, CriterionKind::lm, bm, vm);
    for (int a = 0; a < d_m_; ++a) lam(a, k) = (vp[a] - vm[a]) / (2.0 * h);
  }
  return lam;
}

} // namespace giicov
