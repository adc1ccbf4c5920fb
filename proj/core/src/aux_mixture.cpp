#include "giicov/aux_mixture.hpp"

#include <algorithm>
#include <cmath>

namespace giicov {

Eigen::VectorXd fit_mixture_em(const std::vector<double>& y, int max_iter, double tol) {
  const int n = static_cast<int>(y.size());
  if (n < 10) throw data_error("fit_mixture_em: need at least 10 observations");

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= n;
  if (var <= 0.0) throw data_error("fit_mixture_em: outcomes are constant");

  std::vector<double> sorted(y);
  std::sort(sorted.begin(), sorted.end());
  double mu1 = sorted[n / 4];
  double mu2 = sorted[(3 * n) / 4];
  if (mu2 - mu1 < 1e-8 * (1.0 + std::abs(mu1))) {
    // Quartiles coincide (heavily clustered data); split around the mean instead.
    mu1 = mean - 0.5 * std::sqrt(var);
    mu2 = mean + 0.5 * std::sqrt(var);
  }
  double s1sq = var, s2sq = var, pi = 0.5;
  const double var_floor = 1e-10 * var;

  std::vector<double> gam(n);
  for (int it = 0; it < max_iter; ++it) {
    // E step in log space to dodge underflow.
    for (int i = 0; i < n; ++i) {
      const double l1 = std::log1p(-pi) - 0.5 * std::log(s1sq) -
                        0.5 * (y[i] - mu1) * (y[i] - mu1) / s1sq;
      const double l2 = std::log(pi) - 0.5 * std::log(s2sq) -
                        0.5 * (y[i] - mu2) * (y[i] - mu2) / s2sq;
      const double m = std::max(l1, l2);
      const double e1 = std::exp(l1 - m), e2 = std::exp(l2 - m);
      gam[i] = e2 / (e1 + e2);
    }

    double w2 = 0.0, sy1 = 0.0, sy2 = 0.0;
    for (int i = 0; i < n; ++i) {
      w2 += gam[i];
      sy1 += (1.0 - gam[i]) * y[i];
      sy2 += gam[i] * y[i];
    }
    const double w1 = n - w2;
    const double new_pi = std::clamp(w2 / n, 1e-8, 1.0 - 1e-8);
    const double new_mu1 = w1 > 0.0 ? sy1 / w1 : mu1;
    const double new_mu2 = w2 > 0.0 ? sy2 / w2 : mu2;
    double sv1 = 0.0, sv2 = 0.0;
    for (int i = 0; i < n; ++i) {
      sv1 += (1.0 - gam[i]) * (y[i] - new_mu1) * (y[i] - new_mu1);
      sv2 += gam[i] * (y[i] - new_mu2) * (y[i] - new_mu2);
    }
    const double new_s1sq = std::max(w1 > 0.0 ? sv1 / w1 : s1sq, var_floor);
    const double new_s2sq = std::max(w2 > 0.0 ? sv2 / w2 : s2sq, var_floor);

    const double step = std::abs(new_mu1 - mu1) + std::abs(new_mu2 - mu2) +
                        std::abs(new_s1sq - s1sq) + std::abs(new_s2sq - s2sq) +
                        std::abs(new_pi - pi);
    mu1 = new_mu1;
    mu2 = new_mu2;
    s1sq = new_s1sq;
    s2sq = new_s2sq;
    pi = new_pi;
    if (step < tol * (1.0 + std::abs(mu1) + std::abs(mu2))) break;
  }

  if (mu1 > mu2) {
    std::swap(mu1, mu2);
    std::swap(s1sq, s2sq);
    pi = 1.0 - pi;
  }
  Eigen::VectorXd beta(kMixtureDim);
  beta << mu1, s1sq, mu2, s2sq, pi;
  return beta;
}

} // namespace giicov
