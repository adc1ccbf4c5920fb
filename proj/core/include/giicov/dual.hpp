#pragma once

// Forward-mode dual numbers with a runtime parameter dimension (up to kMaxParamDim).
// Dual1 carries a gradient, Dual2 additionally the upper triangle of a Hessian.
//
// A hard requirement throughout: the value component of every operation is computed
// by exactly the expression the plain-double code path would use, so running a
// simulator on duals produces bitwise the same trajectory values as running it on
// doubles. Derivative components ride along without perturbing values.
//
// Constants are duals with dim 0; binary operations broadcast to max(dim_a, dim_b).
// Branch decisions in simulators are made on plain doubles (anchor quantities), so no
// derivative information is ever lost to a comparison.

#include <array>
#include <cmath>

#include "giicov/errors.hpp"
#include "giicov/normal.hpp"

namespace giicov {

inline constexpr int kMaxParamDim = 8;
inline constexpr int kHessStorage = kMaxParamDim * (kMaxParamDim + 1) / 2;

// Index into the packed upper triangle, valid for i <= j.
inline constexpr int hess_index(int i, int j) {
  return i * kMaxParamDim - i * (i - 1) / 2 + (j - i);
}

struct Dual1 {
  double v = 0.0;
  int n = 0;
  std::array<double, kMaxParamDim> g{};

  Dual1() = default;
  // Implicit from double so numeric literals mix freely with duals in templated code.
  Dual1(double value) : v(value) {}

  static Dual1 constant(double value) { return Dual1(value); }

  static Dual1 variable(double value, int index, int dim) {
    if (index < 0 || dim <= 0 || index >= dim || dim > kMaxParamDim) {
      throw contract_error("Dual1::variable: bad index/dim");
    }
    Dual1 x(value);
    x.n = dim;
    x.g[index] = 1.0;
    return x;
  }
};

struct Dual2 {
  double v = 0.0;
  int n = 0;
  std::array<double, kMaxParamDim> g{};
  std::array<double, kHessStorage> h{};

  Dual2() = default;
  Dual2(double value) : v(value) {}

  static Dual2 constant(double value) { return Dual2(value); }

  static Dual2 variable(double value, int index, int dim) {
    if (index < 0 || dim <= 0 || index >= dim || dim > kMaxParamDim) {
      throw contract_error("Dual2::variable: bad index/dim");
    }
    Dual2 x(value);
    x.n = dim;
    x.g[index] = 1.0;
    return x;
  }

  double hess(int i, int j) const { return i <= j ? h[hess_index(i, j)] : h[hess_index(j, i)]; }
};

// value() lets templated code read the double part regardless of scalar type.
inline constexpr double value(double x) { return x; }
inline double value(const Dual1& x) { return x.v; }
inline double value(const Dual2& x) { return x.v; }

// ---------------------------------------------------------------------------
// Dual1 arithmetic
// ---------------------------------------------------------------------------

inline Dual1 operator+(const Dual1& a, const Dual1& b) {
  Dual1 r(a.v + b.v);
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] + b.g[i];
  return r;
}

inline Dual1 operator-(const Dual1& a, const Dual1& b) {
  Dual1 r(a.v - b.v);
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] - b.g[i];
  return r;
}

inline Dual1 operator-(const Dual1& a) {
  Dual1 r(-a.v);
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = -a.g[i];
  return r;
}

inline Dual1 operator*(const Dual1& a, const Dual1& b) {
  Dual1 r(a.v * b.v);
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  return r;
}

inline Dual1 operator/(const Dual1& a, const Dual1& b) {
  Dual1 r(a.v / b.v);
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = (a.g[i] - r.v * b.g[i]) / b.v;
  return r;
}

// ---------------------------------------------------------------------------
// Dual2 arithmetic
// ---------------------------------------------------------------------------

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
  Dual2 r(a.v + b.v);
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] + b.g[i];
  for (int i = 0; i < r.n; ++i) {
    for (int j = i; j < r.n; ++j) {
      const int k = hess_index(i, j);
      r.h[k] = a.h[k] + b.h[k];
    }
  }
  return r;
}

inline Dual2 operator-(const Dual2& a, const Dual2& b) {
  Dual2 r(a.v - b.v);
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] - b.g[i];
  for (int i = 0; i < r.n; ++i) {
    for (int j = i; j < r.n; ++j) {
      const int k = hess_index(i, j);
      r.h[k] = a.h[k] - b.h[k];
    }
  }
  return r;
}

inline Dual2 operator-(const Dual2& a) {
  Dual2 r(-a.v);
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = -a.g[i];
  for (int i = 0; i < r.n; ++i) {
    for (int j = i; j < r.n; ++j) {
      const int k = hess_index(i, j);
      r.h[k] = -a.h[k];
    }
  }
  return r;
}

inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  Dual2 r(a.v * b.v);
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  for (int i = 0; i < r.n; ++i) {
    for (int j = i; j < r.n; ++j) {
      const int k = hess_index(i, j);
      r.h[k] = a.h[k] * b.v + a.v * b.h[k] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    }
  }
  return r;
}

inline Dual2 operator/(const Dual2& a, const Dual2& b) {
  Dual2 r(a.v / b.v);
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = (a.g[i] - r.v * b.g[i]) / b.v;
  for (int i = 0; i < r.n; ++i) {
    for (int j = i; j < r.n; ++j) {
      const int k = hess_index(i, j);
      r.h[k] = (a.h[k] - r.v * b.h[k] - r.g[i] * b.g[j] - r.g[j] * b.g[i]) / b.v;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Comparisons (value parts; used for branch decisions and segment search)
// ---------------------------------------------------------------------------

inline bool operator<(const Dual1& a, const Dual1& b) { return a.v < b.v; }
inline bool operator<=(const Dual1& a, const Dual1& b) { return a.v <= b.v; }
inline bool operator>(const Dual1& a, const Dual1& b) { return a.v > b.v; }
inline bool operator>=(const Dual1& a, const Dual1& b) { return a.v >= b.v; }
inline bool operator<(const Dual2& a, const Dual2& b) { return a.v < b.v; }
inline bool operator<=(const Dual2& a, const Dual2& b) { return a.v <= b.v; }
inline bool operator>(const Dual2& a, const Dual2& b) { return a.v > b.v; }
inline bool operator>=(const Dual2& a, const Dual2& b) { return a.v >= b.v; }

// ---------------------------------------------------------------------------
// Elementary functions via the chain rule. unary() centralizes the pattern:
// r = f(x.v), dr = f' dx, d2r = f' d2x + f'' dx dx'.
// ---------------------------------------------------------------------------

inline Dual1 unary(const Dual1& x, double f, double fp) {
  Dual1 r(f);
  r.n = x.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = fp * x.g[i];
  return r;
}

inline Dual2 unary(const Dual2& x, double f, double fp, double fpp) {
  Dual2 r(f);
  r.n = x.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = fp * x.g[i];
  for (int i = 0; i < r.n; ++i) {
    for (int j = i; j < r.n; ++j) {
      const int k = hess_index(i, j);
      r.h[k] = fp * x.h[k] + fpp * x.g[i] * x.g[j];
    }
  }
  return r;
}

inline Dual1 exp(const Dual1& x) {
  const double e = std::exp(x.v);
  return unary(x, e, e);
}
inline Dual2 exp(const Dual2& x) {
  const double e = std::exp(x.v);
  return unary(x, e, e, e);
}

inline Dual1 log(const Dual1& x) { return unary(x, std::log(x.v), 1.0 / x.v); }
inline Dual2 log(const Dual2& x) {
  const double inv = 1.0 / x.v;
  return unary(x, std::log(x.v), inv, -inv * inv);
}

inline Dual1 log1p(const Dual1& x) { return unary(x, std::log1p(x.v), 1.0 / (1.0 + x.v)); }
inline Dual2 log1p(const Dual2& x) {
  const double inv = 1.0 / (1.0 + x.v);
  return unary(x, std::log1p(x.v), inv, -inv * inv);
}

inline Dual1 expm1(const Dual1& x) { return unary(x, std::expm1(x.v), std::exp(x.v)); }
inline Dual2 expm1(const Dual2& x) {
  const double e = std::exp(x.v);
  return unary(x, std::expm1(x.v), e, e);
}

inline Dual1 sqrt(const Dual1& x) {
  const double s = std::sqrt(x.v);
  return unary(x, s, 0.5 / s);
}
inline Dual2 sqrt(const Dual2& x) {
  const double s = std::sqrt(x.v);
  return unary(x, s, 0.5 / s, -0.25 / (s * x.v));
}

// Normal kernels on duals. Value parts call the exact double implementations.

inline Dual1 normal_cdf(const Dual1& x) {
  return unary(x, normal_cdf(x.v), normal_pdf(x.v));
}
inline Dual2 normal_cdf(const Dual2& x) {
  const double pdf = normal_pdf(x.v);
  return unary(x, normal_cdf(x.v), pdf, -x.v * pdf);
}

inline Dual1 normal_pdf(const Dual1& x) {
  const double pdf = normal_pdf(x.v);
  return unary(x, pdf, -x.v * pdf);
}
inline Dual2 normal_pdf(const Dual2& x) {
  const double pdf = normal_pdf(x.v);
  return unary(x, pdf, -x.v * pdf, (x.v * x.v - 1.0) * pdf);
}

// (Phi^-1)'(p) = 1/phi(z), (Phi^-1)''(p) = z/phi(z)^2 with z = Phi^-1(p).
inline Dual1 inv_normal_cdf(const Dual1& p) {
  const double z = inv_normal_cdf(p.v);
  return unary(p, z, 1.0 / normal_pdf(z));
}
inline Dual2 inv_normal_cdf(const Dual2& p) {
  const double z = inv_normal_cdf(p.v);
  const double pdf = normal_pdf(z);
  return unary(p, z, 1.0 / pdf, z / (pdf * pdf));
}

// Forwarders so unqualified math calls inside this namespace accept plain doubles in
// templated code paths.
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double log1p(double x) { return std::log1p(x); }
inline double expm1(double x) { return std::expm1(x); }
inline double sqrt(double x) { return std::sqrt(x); }

} // namespace giicov
