// Distribution kernels: the CDF against a quadrature oracle, the inverse CDF against
// bisection and textbook quantiles, round trips, and domain guards.

#include "giicov/normal.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "support/oracles.hpp"

namespace {

TEST(NormalCdf, MatchesQuadratureOracle) {
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    EXPECT_NEAR(giicov::normal_cdf(x), giicov::oracle::normal_cdf(x), 1e-13) << "x=" << x;
  }
}

TEST(NormalCdf, KnownValues) {
  EXPECT_DOUBLE_EQ(giicov::normal_cdf(0.0), 0.5);
  // Phi(1) and Phi(2) to 16 digits.
  EXPECT_NEAR(giicov::normal_cdf(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(giicov::normal_cdf(2.0), 0.9772498680518208, 1e-15);
  // Lower tail keeps relative accuracy through erfc.
  EXPECT_NEAR(giicov::normal_cdf(-6.0) / 9.865876450376946e-10, 1.0, 1e-12);
}

TEST(NormalPdf, SymmetricAndNormalized) {
  for (double x = 0.0; x <= 5.0; x += 0.5) {
    EXPECT_DOUBLE_EQ(giicov::normal_pdf(x), giicov::normal_pdf(-x));
  }
  EXPECT_NEAR(giicov::normal_pdf(0.0), 0.3989422804014327, 1e-16);
  const double total = giicov::oracle::simpson([](double x) { return giicov::normal_pdf(x); },
                                               -9.0, 9.0);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(InvNormalCdf, MatchesBisectionOracle) {
  for (double p : {0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999}) {
    EXPECT_NEAR(giicov::inv_normal_cdf(p), giicov::oracle::inv_normal_cdf(p), 1e-11)
        << "p=" << p;
  }
}

TEST(InvNormalCdf, TextbookQuantiles) {
  EXPECT_DOUBLE_EQ(giicov::inv_normal_cdf(0.5), 0.0);
  EXPECT_NEAR(giicov::inv_normal_cdf(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(giicov::inv_normal_cdf(0.95), 1.6448536269514722, 1e-12);
  EXPECT_NEAR(giicov::inv_normal_cdf(0.995), 2.5758293035489004, 1e-12);
}

TEST(InvNormalCdf, RoundTripAcrossTheWholeRange) {
  // Phi(Phi^-1(p)) = p to 1e-9 absolute on a grid reaching deep into both tails, and
  // Phi^-1(Phi(x)) = x to 1e-9 on |x| <= 8.
  for (double lp = -12.0; lp <= -0.31; lp += 0.17) {
    const double p = std::pow(10.0, lp);
    EXPECT_NEAR(giicov::normal_cdf(giicov::inv_normal_cdf(p)), p, 1e-9) << "p=" << p;
    EXPECT_NEAR(giicov::normal_cdf(giicov::inv_normal_cdf(1.0 - p)), 1.0 - p, 1e-9);
  }
  // x-space round trip. The lower tail keeps full relative accuracy (erfc route), so
  // 1e-9 holds down to -8. In the upper tail Phi(x) is 1 minus a tiny mass and the
  // double grid near 1 has spacing ~1.1e-16, so the best any inverse can do is that
  // spacing divided by the density; test against that conditioning bound instead.
  for (double x = -8.0; x <= 5.3; x += 0.37) {
    EXPECT_NEAR(giicov::inv_normal_cdf(giicov::normal_cdf(x)), x, 1e-9) << "x=" << x;
  }
  for (double x = 5.5; x <= 8.0; x += 0.37) {
    const double cond = 3.0 * 1.1e-16 / giicov::normal_pdf(x);
    EXPECT_NEAR(giicov::inv_normal_cdf(giicov::normal_cdf(x)), x, cond) << "x=" << x;
  }
}

TEST(InvNormalCdf, Antisymmetric) {
  for (double p : {0.01, 0.1, 0.3, 0.45}) {
    EXPECT_NEAR(giicov::inv_normal_cdf(p), -giicov::inv_normal_cdf(1.0 - p), 1e-12);
  }
}

TEST(InvNormalCdf, RejectsOutOfDomain) {
  EXPECT_THROW(giicov::inv_normal_cdf(0.0), std::domain_error);
  EXPECT_THROW(giicov::inv_normal_cdf(1.0), std::domain_error);
  EXPECT_THROW(giicov::inv_normal_cdf(-0.5), std::domain_error);
  EXPECT_THROW(giicov::inv_normal_cdf(1.5), std::domain_error);
  EXPECT_THROW(giicov::inv_normal_cdf(std::nan("")), std::domain_error);
}

TEST(InvExpCdf, RoundTripAndGuards) {
  for (double mean : {0.5, 1.0, 3.0}) {
    for (double p : {1e-8, 0.001, 0.3, 0.9, 0.999999}) {
      const double x = giicov::inv_exp_cdf(p, mean);
      EXPECT_NEAR(giicov::exp_cdf(x, mean), p, 1e-12);
    }
    EXPECT_DOUBLE_EQ(giicov::inv_exp_cdf(0.0, mean), 0.0);
  }
  // Median of Exp(mean) is mean*log(2).
  EXPECT_NEAR(giicov::inv_exp_cdf(0.5, 2.0), 2.0 * std::log(2.0), 1e-14);
  EXPECT_THROW(giicov::inv_exp_cdf(1.0, 1.0), std::domain_error);
  EXPECT_THROW(giicov::inv_exp_cdf(-0.1, 1.0), std::domain_error);
}

TEST(ExpCdf, ZeroBelowOrigin) {
  EXPECT_DOUBLE_EQ(giicov::exp_cdf(-1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(giicov::exp_cdf(0.0, 1.0), 0.0);
  EXPECT_NEAR(giicov::exp_cdf(1.0, 1.0), 1.0 - std::exp(-1.0), 1e-15);
}

} // namespace
