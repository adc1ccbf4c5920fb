#pragma once

// Two-component normal mixture auxiliary model for positive scalar outcomes (queue
// sojourn times). beta packs (mu1, s1sq, mu2, s2sq, pi) with pi the weight of the
// second component and mu1 <= mu2 as the labeling convention.
//
// The five moment conditions are the first-order conditions of the mixture
// likelihood written with posterior responsibilities gamma(y) = pi phi2 / ((1-pi)
// phi1 + pi phi2):
//
//   (1-gamma)(y - mu1),  gamma (y - mu2),
//   (1-gamma)((y - mu1)^2 - s1sq),  gamma ((y - mu2)^2 - s2sq),
//   gamma - pi
//
// so they average to zero at the EM fixed point and have mean zero in population at
// the true parameter. mixture_moments is templated over the outcome's scalar type so
// dual numbers flow through the simulated criterion.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "giicov/dual.hpp"
#include "giicov/errors.hpp"
#include "giicov/normal.hpp"

namespace giicov {

inline constexpr int kMixtureDim = 5;

// Maximum likelihood fit by EM. Deterministic: quartile-based initialization,
// fixed iteration cap, component labels ordered by mean on exit.
Eigen::VectorXd fit_mixture_em(const std::vector<double>& y, int max_iter = 500,
                               double tol = 1e-12);

template <class S>
void mixture_moments(const Eigen::VectorXd& beta, const S& y, S* out) {
  const double mu1 = beta[0], s1sq = beta[1], mu2 = beta[2], s2sq = beta[3], pi = beta[4];
  const S d1 = y - mu1;
  const S d2 = y - mu2;
  const S p1 = exp(d1 * d1 * (-0.5 / s1sq)) * (kInvSqrt2Pi / std::sqrt(s1sq));
  const S p2 = exp(d2 * d2 * (-0.5 / s2sq)) * (kInvSqrt2Pi / std::sqrt(s2sq));
  // The floor keeps gamma finite when an outcome sits far outside both components.
  const S den = p1 * (1.0 - pi) + p2 * pi + 1e-300;
  const S gam = p2 * pi / den;
  const S one_minus = 1.0 - gam;
  out[0] = one_minus * d1;
  out[1] = gam * d2;
  out[2] = one_minus * (d1 * d1 - s1sq);
  out[3] = gam * (d2 * d2 - s2sq);
  out[4] = gam - pi;
}

} // namespace giicov
