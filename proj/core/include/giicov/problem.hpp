#pragma once

// Criterion assembly: observed data plus a model choice become an objective in
// theta that Newton-type optimizers can differentiate exactly. Construction fits
// the auxiliary model on the observed sample and freezes the weighting matrix and
// the per-replication uniform draws. set_anchor simulates at theta* and records
// every critical-point grid; value and derivs then rerun the simulations through
// the change of variables against those recorded grids, so simulated outcomes hold
// their discrete branches while parameter dependence flows smoothly through the
// transformed draws and Jacobian weights. anchored_value instead re-simulates
// directly at theta, giving the plain discontinuous criterion; the two coincide at
// theta = theta*.
//
// Moment assembly applies the auxiliary statistic to the simulated data the same
// way the observed fit applies it to the sample: exogenous regressors (intercept
// and covariates) keep their observed values, while lagged-outcome regressors come
// from the simulated path itself. Panel rows are weighted by their own period's
// cell; the autoregression and queue models are functionals of the whole simulated
// path, so their rows carry cumulative weight products through time.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "giicov/aux_sur.hpp"
#include "giicov/data.hpp"
#include "giicov/models.hpp"
#include "giicov/rng.hpp"

namespace giicov {

enum class CriterionKind { lm, wald };
enum class WeightScheme { identity, efficient };

struct ProblemOptions {
  int replications = 10;
  std::uint64_t master_seed = 1;
  std::uint64_t mc_replication = 0; // indexes the observed sample in Monte Carlo runs
  CriterionKind criterion = CriterionKind::lm;
  WeightScheme weight = WeightScheme::efficient;
};

struct CriterionDerivs {
  double q = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

class CovProblem {
public:
  CovProblem(ModelKind kind, const PanelData& data, const ProblemOptions& opt);

  const ModelInfo& info() const { return *info_; }
  const ProblemOptions& options() const { return opt_; }
  int theta_dim() const { return info_->theta_dim; }
  int moment_dim() const { return d_m_; }
  // Independent sampling units behind the moment average: panel units, pooled time
  // steps, or queue customers. Moment sums and the observed moment covariance are
  // both normalized by this count.
  int sample_units() const { return kappa_; }

  const Eigen::VectorXd& beta_hat() const { return beta_hat_; }
  const Eigen::MatrixXd& omega() const { return omega_; }
  const Eigen::MatrixXd& xi_hat() const { return xi_hat_; }

  // Simulates at theta_star and records the critical-point grids all later value
  // and derivs calls transform against. Throws std::invalid_argument when
  // theta_star violates the model's bounds.
  void set_anchor(const Eigen::VectorXd& theta_star);
  bool anchored() const { return anchored_; }
  const Eigen::VectorXd& anchor() const { return anchor_; }

  // Criterion at theta through the change of variables (requires an anchor).
  // Returns +infinity for theta outside the model's valid set, so line searches
  // back away from it.
  double value(const Eigen::VectorXd& theta) const;

  // Criterion from a direct simulation at theta, no anchor involved: the standard
  // simulated criterion with its discontinuities intact.
  double anchored_value(const Eigen::VectorXd& theta) const;

  // Exact derivatives of value at theta. full_hessian selects the complete second
  // order; otherwise the Hessian is the Gauss-Newton surrogate built from first
  // derivatives of the criterion vector.
  CriterionDerivs derivs(const Eigen::VectorXd& theta, bool full_hessian) const;

  // Moment-level pieces for sandwich variance estimation. These always evaluate
  // the score-style moment vector, independent of which criterion value() uses.
  Eigen::VectorXd moment_value(const Eigen::VectorXd& theta) const;
  Eigen::MatrixXd moment_jacobian_ad(const Eigen::VectorXd& theta) const;
  Eigen::MatrixXd moment_jacobian_fd(const Eigen::VectorXd& theta, double step) const;
  // Derivative of the moment vector in the auxiliary coefficients, by central
  // differences with per-component step 1e-6 * (1 + |beta_k|). Exact (to rounding)
  // for the linear auxiliary designs.
  Eigen::MatrixXd beta_jacobian_fd(const Eigen::VectorXd& theta) const;

private:
  enum class Family { panel, series_exp, series_queue };

  // Per-replication pieces of the binding-function criterion: each replication's
  // unweighted instrument Gram and its weighted response cross moments.
  template <class S>
  struct WaldScratch {
    std::vector<Eigen::MatrixXd> gram;
    std::vector<std::vector<S>> zy;
  };

  template <class S, class PolicyFactory>
  void accumulate(const S* th, PolicyFactory&& pf, const Eigen::VectorXd* beta,
                  S* m, WaldScratch<S>* wald = nullptr) const;

  template <class S, class PolicyFactory>
  void criterion_vector(const Eigen::VectorXd& theta, PolicyFactory&& pf,
                        CriterionKind crit, const Eigen::VectorXd& beta,
                        std::vector<S>& out) const;

  template <class S>
  void cov_vector(const Eigen::VectorXd& theta, CriterionKind crit,
                  const Eigen::VectorXd& beta, std::vector<S>& out) const;

  template <class S>
  S quad_form(const std::vector<S>& v) const;

  void require_anchor() const;

  const ModelInfo* info_;
  ProblemOptions opt_;
  Family family_;
  bool ordered_ = false;

  SurDesign sur_;          // panel and pooled designs; unused for the mixture
  bool mixture_ = false;
  Eigen::VectorXd beta_hat_;
  Eigen::MatrixXd xi_hat_, omega_;
  int d_m_ = 0;
  int kappa_ = 0;

  int n_paths_ = 0; // simulated paths per replication: panel units, or 1
  int t_sim_ = 0;   // simulated path length: periods, series steps, or customers
  int pre_len_ = 0; // latent presample periods ahead of the observed window

  std::vector<UniformPanel> u_main_, u_aux_;   // one per replication
  std::vector<std::vector<double>> x_pre_;     // [r][i * pre_len_ + t]
  std::vector<std::vector<double>> x_obs_;     // [i][t], observed slots of the row

  Eigen::VectorXd anchor_;
  std::vector<AnchorCache> caches_; // [i * replications + r]
  bool anchored_ = false;
};

} // namespace giicov
