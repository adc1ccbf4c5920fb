// Dual-number derivatives: gradients and Hessians against central finite
// differences on a composite using every elementary operation, identity
// compositions, constant/broadcast semantics, and the guarantee that the value
// component follows the plain-double path bit for bit.

#include "giicov/dual.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <functional>

namespace {

using giicov::Dual1;
using giicov::Dual2;

// Exercises +,-,*,/, exp, log, log1p, expm1, sqrt, normal_cdf, normal_pdf,
// inv_normal_cdf with nontrivial nesting.
template <class S>
S composite(const std::array<S, 3>& th) {
  using giicov::normal_cdf;
  using giicov::normal_pdf;
  using giicov::inv_normal_cdf;
  using giicov::exp;
  using giicov::log;
  using giicov::log1p;
  using giicov::expm1;
  using giicov::sqrt;
  const S a = exp(th[0] * 0.3) / (th[1] * th[1] + 1.5);
  const S b = normal_cdf(th[0] - th[2] * a) * 0.9 + 0.05;
  const S c = log1p(b * b) + sqrt(th[1] + 2.0) * normal_pdf(th[2] * 0.7);
  return a * b - c / (a + 2.0) + expm1(b * 0.1) + log(a + 0.5) - inv_normal_cdf(b);
}

double composite_at(const std::array<double, 3>& th) { return composite<double>(th); }

TEST(Dual1, GradientMatchesCentralDifferences) {
  const std::array<double, 3> th = {0.8, -0.4, 1.3};
  std::array<Dual1, 3> d;
  for (int k = 0; k < 3; ++k) d[k] = Dual1::variable(th[k], k, 3);
  const Dual1 f = composite(d);

  EXPECT_DOUBLE_EQ(f.v, composite_at(th));
  for (int k = 0; k < 3; ++k) {
    const double h = 1e-6 * (1.0 + std::abs(th[k]));
    auto thp = th, thm = th;
    thp[k] += h;
    thm[k] -= h;
    const double fd = (composite_at(thp) - composite_at(thm)) / (2.0 * h);
    EXPECT_NEAR(f.g[k], fd, 1e-6 * (1.0 + std::abs(fd))) << "k=" << k;
  }
}

TEST(Dual2, HessianMatchesCentralDifferences) {
  const std::array<double, 3> th = {0.8, -0.4, 1.3};
  std::array<Dual2, 3> d;
  for (int k = 0; k < 3; ++k) d[k] = Dual2::variable(th[k], k, 3);
  const Dual2 f = composite(d);

  // Value and gradient agree with the first-order type.
  std::array<Dual1, 3> d1;
  for (int k = 0; k < 3; ++k) d1[k] = Dual1::variable(th[k], k, 3);
  const Dual1 f1 = composite(d1);
  EXPECT_EQ(f.v, f1.v);
  for (int k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(f.g[k], f1.g[k]);

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double hi = 1e-4 * (1.0 + std::abs(th[i]));
      const double hj = 1e-4 * (1.0 + std::abs(th[j]));
      auto tpp = th, tpm = th, tmp = th, tmm = th;
      tpp[i] += hi; tpp[j] += hj;
      tpm[i] += hi; tpm[j] -= hj;
      tmp[i] -= hi; tmp[j] += hj;
      tmm[i] -= hi; tmm[j] -= hj;
      const double fd = (composite_at(tpp) - composite_at(tpm) - composite_at(tmp) +
                         composite_at(tmm)) /
                        (4.0 * hi * hj);
      EXPECT_NEAR(f.hess(i, j), fd, 1e-4 * (1.0 + std::abs(fd))) << i << "," << j;
    }
  }
}

TEST(Dual2, HessianAccessorIsSymmetric) {
  std::array<Dual2, 2> d = {Dual2::variable(0.3, 0, 2), Dual2::variable(-1.1, 1, 2)};
  const Dual2 f = d[0] * d[1] * d[1] + giicov::exp(d[0] * d[1]);
  EXPECT_DOUBLE_EQ(f.hess(0, 1), f.hess(1, 0));
  EXPECT_NE(f.hess(0, 1), 0.0);
}

TEST(Dual, ConstantsCarryNoDerivatives) {
  const Dual1 c = Dual1::constant(3.5);
  EXPECT_EQ(c.n, 0);
  const Dual1 x = Dual1::variable(2.0, 1, 3);
  const Dual1 y = x * c + 7.0;
  EXPECT_EQ(y.n, 3);
  EXPECT_DOUBLE_EQ(y.v, 14.0);
  EXPECT_DOUBLE_EQ(y.g[0], 0.0);
  EXPECT_DOUBLE_EQ(y.g[1], 3.5);
  EXPECT_DOUBLE_EQ(y.g[2], 0.0);
}

TEST(Dual, IdentityCompositions) {
  const Dual1 x = Dual1::variable(1.7, 0, 1);
  const Dual1 el = giicov::exp(giicov::log(x));
  EXPECT_NEAR(el.v, 1.7, 1e-15);
  EXPECT_NEAR(el.g[0], 1.0, 1e-14);

  const Dual1 rt = giicov::inv_normal_cdf(giicov::normal_cdf(x * 0.5));
  EXPECT_NEAR(rt.v, 0.85, 1e-12);
  EXPECT_NEAR(rt.g[0], 0.5, 1e-11);

  const Dual2 x2 = Dual2::variable(1.7, 0, 1);
  const Dual2 rt2 = giicov::inv_normal_cdf(giicov::normal_cdf(x2 * 0.5));
  EXPECT_NEAR(rt2.v, 0.85, 1e-12);
  EXPECT_NEAR(rt2.g[0], 0.5, 1e-11);
  // Second derivative of the identity is 0; the composition cancels to roundoff.
  EXPECT_NEAR(rt2.hess(0, 0), 0.0, 1e-9);
}

TEST(Dual, DivisionInvertsMultiplication) {
  const Dual1 a = Dual1::variable(2.2, 0, 2);
  const Dual1 b = Dual1::variable(-0.7, 1, 2);
  const Dual1 q = (a / b) * b;
  EXPECT_NEAR(q.v, 2.2, 1e-15);
  EXPECT_NEAR(q.g[0], 1.0, 1e-14);
  EXPECT_NEAR(q.g[1], 0.0, 1e-14);
}

TEST(Dual, ValuePathIsBitwiseIdenticalToDoubles) {
  // A probit-style latent recursion evaluated on doubles and on both dual orders must
  // produce bitwise identical values. This is the anchor-equality property the change
  // of variables depends on.
  const double gamma = 1.0, rho = 0.4;
  const std::array<double, 6> u = {0.12, 0.93, 0.48, 0.77, 0.05, 0.61};

  auto run = [&u](auto g, auto r) {
    using S = decltype(g);
    S v = 0.0;
    S acc = 0.0;
    for (double ut : u) {
      const S c = giicov::normal_cdf(S(0.0) - g * 1.1 - r * v);
      v = r * v + giicov::inv_normal_cdf(S(ut));
      acc = acc + c * c / (v * v + 1.0);
    }
    return acc;
  };

  const double plain = run(gamma, rho);
  const Dual1 d1 = run(Dual1::variable(gamma, 0, 2), Dual1::variable(rho, 1, 2));
  const Dual2 d2 = run(Dual2::variable(gamma, 0, 2), Dual2::variable(rho, 1, 2));
  EXPECT_EQ(plain, d1.v);
  EXPECT_EQ(plain, d2.v);
  EXPECT_DOUBLE_EQ(d1.g[0], d2.g[0]);
  EXPECT_DOUBLE_EQ(d1.g[1], d2.g[1]);
}

TEST(Dual, ComparisonsUseValues) {
  const Dual1 a = Dual1::variable(0.3, 0, 1);
  const Dual1 b = Dual1::variable(0.7, 0, 1);
  EXPECT_TRUE(a < b);
  EXPECT_TRUE(b > a);
  EXPECT_TRUE(a <= Dual1(0.3));
  EXPECT_TRUE(a >= Dual1(0.3));
}

TEST(Dual, VariableRejectsBadIndexOrDim) {
  EXPECT_THROW(Dual1::variable(0.0, -1, 2), giicov::contract_error);
  EXPECT_THROW(Dual1::variable(0.0, 2, 2), giicov::contract_error);
  EXPECT_THROW(Dual1::variable(0.0, 0, giicov::kMaxParamDim + 1), giicov::contract_error);
  EXPECT_THROW(Dual2::variable(0.0, 5, 3), giicov::contract_error);
}

} // namespace
