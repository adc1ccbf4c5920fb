#pragma once

// Independent reference implementations used only by tests. These deliberately take
// different numerical routes than the library (quadrature instead of erfc, bisection
// instead of a rational approximation) so agreement between the two is evidence, not
// tautology.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace giicov::oracle {

// Composite Simpson integration with a fixed, generous panel count. Error is
// O(h^4) and far below 1e-13 for the smooth integrands used here.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels = 40000) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int k = 1; k < panels; ++k) {
    acc += f(a + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

inline double normal_pdf(double x) {
  return 0.39894228040143267794 * std::exp(-0.5 * x * x);
}

// Standard normal CDF by quadrature from 0: Phi(x) = 1/2 + integral_0^x phi.
// Absolute accuracy ~1e-15; relative accuracy degrades in the far tails, so tests
// using this stick to |x| <= 6 or to absolute tolerances.
inline double normal_cdf(double x) {
  if (x == 0.0) return 0.5;
  const double tail = simpson(normal_pdf, 0.0, std::abs(x));
  return x > 0.0 ? 0.5 + tail : 0.5 - tail;
}

// Inverse standard normal CDF by bisection against the quadrature CDF above.
inline double inv_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("oracle inv_normal_cdf: bad p");
  double lo = -9.0, hi = 9.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace giicov::oracle
