#pragma once

// Scalar normal and exponential distribution kernels. The dual-number overloads that
// make these differentiable live in dual.hpp; templated simulators pick the right one
// by overload resolution.

#include <cmath>

namespace giicov {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794; // 1/sqrt(2*pi)
inline constexpr double kInvSqrt2 = 0.70710678118654752440;   // 1/sqrt(2)

// Standard normal density.
inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Standard normal CDF through erfc, which keeps full relative accuracy in the lower
// tail (erf would cancel there).
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

// Inverse standard normal CDF, Wichura's PPND16 rational approximation (AS 241).
// Absolute error is around 1e-15 over (0,1). Throws std::domain_error outside (0,1).
double inv_normal_cdf(double p);

// Inverse CDF of the exponential distribution with the given mean. log1p keeps
// accuracy for small p. Throws std::domain_error for p outside [0,1).
double inv_exp_cdf(double p, double mean);

// Exponential CDF with the given mean, 0 for x <= 0.
inline double exp_cdf(double x, double mean) {
  return x <= 0.0 ? 0.0 : -std::expm1(-x / mean);
}

} // namespace giicov
