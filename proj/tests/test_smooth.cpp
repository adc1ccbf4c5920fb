// Kernel-smoothed criterion: the smoothed simulator's vanishing-bandwidth limit,
// agreement with the direct criterion at tiny bandwidth, draw sharing across the
// two-step schedule, and the BFGS minimizer on smooth benchmarks.

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "giicov/errors.hpp"
#include "giicov/models.hpp"
#include "giicov/normal.hpp"
#include "giicov/problem.hpp"
#include "giicov/rng.hpp"
#include "giicov/smooth.hpp"

namespace giicov {
namespace {

ProblemOptions small_options(int replications, std::uint64_t seed) {
  ProblemOptions opt;
  opt.replications = replications;
  opt.master_seed = seed;
  opt.weight = WeightScheme::identity;
  return opt;
}

TEST(SmoothSimulator, TinyBandwidthRecoversTheHardIndicators) {
  const double gamma = 1.0;
  const double rho = 0.4;
  const int t_len = 12;
  const UniformPanel uu({7, 0, stream_role::sim_shock}, 1, t_len, 1);
  const UniformPanel ux({7, 0, stream_role::sim_x}, 1, t_len, 1);
  double x[16], u[16], y_hard[16], y_soft[16], w[16];
  for (int t = 0; t < t_len; ++t) {
    x[t] = x_from_uniform(ux(0, t, 0));
    u[t] = uu(0, t, 0);
  }
  DirectPolicy pol;
  binary_panel_unit(gamma, 0.0, rho, x, t_len, u, pol, y_hard, w);
  binary_panel_unit_smoothed(gamma, 0.0, rho, x, t_len, u, 1e-6, y_soft);

  // Reproduce the latent margin per cell; away from the threshold the smoothed
  // outcome must sit on the hard indicator.
  double v = 0.0;
  for (int t = 0; t < t_len; ++t) {
    const double shock = inv_normal_cdf(u[t]);
    const double s = gamma * x[t] + rho * v + shock;
    if (std::abs(s) > 1e-2) {
      EXPECT_EQ(y_hard[t], s > 0.0 ? 1.0 : 0.0);
      EXPECT_LE(std::abs(y_soft[t] - y_hard[t]), 1e-3);
    }
    v = rho * v + shock;
  }
}

TEST(SmoothProblem, TinyBandwidthMatchesTheDirectCriterion) {
  for (const ModelKind kind :
       {ModelKind::binary_ar, ModelKind::dynamic_binary_window}) {
    const ModelInfo& mi = model_info(kind);
    const PanelData data = simulate_observed(kind, mi.theta0, 91, 0, 40, 5);
    const ProblemOptions opt = small_options(2, 91);
    const CovProblem hard(kind, data, opt);
    const SmoothProblem soft(kind, data, opt, 1e-6);
    Eigen::VectorXd th = mi.theta0;
    th[0] = 0.9;
    th[mi.theta_dim - 1] = 0.35;
    const double qh = hard.anchored_value(th);
    const double qs = soft.value(th);
    EXPECT_LT(std::abs(qh - qs), 1e-6 * std::max(1.0, std::abs(qh)))
        << mi.name << " hard " << qh << " soft " << qs;
  }
}

TEST(SmoothProblem, TinyBandwidthMatchesTheDirectBindingCriterion) {
  const ModelKind kind = ModelKind::dynamic_binary;
  const ModelInfo& mi = model_info(kind);
  const PanelData data = simulate_observed(kind, mi.theta0, 17, 0, 40, 5);
  ProblemOptions opt = small_options(2, 17);
  opt.criterion = CriterionKind::wald;
  const CovProblem hard(kind, data, opt);
  const SmoothProblem soft(kind, data, opt, 1e-6);
  Eigen::VectorXd th = mi.theta0;
  th[0] = 1.1;
  const double qh = hard.anchored_value(th);
  const double qs = soft.value(th);
  EXPECT_LT(std::abs(qh - qs), 1e-6 * std::max(1.0, std::abs(qh)));
}

TEST(SmoothProblem, CriterionIsLocallySmoothAtWorkingBandwidth) {
  const ModelKind kind = ModelKind::dynamic_binary;
  const ModelInfo& mi = model_info(kind);
  const PanelData data = simulate_observed(kind, mi.theta0, 23, 0, 60, 5);
  const SmoothProblem soft(kind, data, small_options(3, 23), 0.08);
  Eigen::VectorXd th = mi.theta0;
  const double q0 = soft.value(th);
  th[2] += 1e-7;
  const double q1 = soft.value(th);
  EXPECT_LT(std::abs(q1 - q0), 1e-5);
}

TEST(SmoothProblem, TwoStepStageOneSeesAPrefixOfTheStageTwoDraws) {
  const ModelKind kind = ModelKind::binary_ar;
  const ModelInfo& mi = model_info(kind);
  const PanelData data = simulate_observed(kind, mi.theta0, 5, 0, 30, 5);
  SmoothProblem wide(kind, data, small_options(40, 5), 0.03);
  const SmoothProblem narrow(kind, data, small_options(10, 5), 0.03);
  wide.use_replications(10);
  Eigen::VectorXd th = mi.theta0;
  th[0] = 0.8;
  EXPECT_EQ(wide.value(th), narrow.value(th));
  wide.use_replications(40);
  EXPECT_NE(wide.value(th), narrow.value(th));
}

TEST(SmoothProblem, RejectsModelsOutsideTheBinaryFamily) {
  const ModelInfo& mi = model_info(ModelKind::exp_ar);
  const PanelData data = simulate_observed(ModelKind::exp_ar, mi.theta0, 3, 0, 1, 50);
  EXPECT_THROW(SmoothProblem(ModelKind::exp_ar, data, small_options(2, 3), 0.08),
               config_error);
}

TEST(SmoothProblem, RejectsNonPositiveBandwidths) {
  const ModelInfo& mi = model_info(ModelKind::binary_ar);
  const PanelData data = simulate_observed(ModelKind::binary_ar, mi.theta0, 3, 0, 10, 5);
  EXPECT_THROW(SmoothProblem(ModelKind::binary_ar, data, small_options(2, 3), 0.0),
               config_error);
  SmoothProblem sp(ModelKind::binary_ar, data, small_options(2, 3), 0.08);
  EXPECT_THROW(sp.set_bandwidth(-1.0), config_error);
  EXPECT_THROW(sp.use_replications(0), config_error);
  EXPECT_THROW(sp.use_replications(3), config_error);
}

TEST(Bfgs, QuadraticConvergesWithAGradientStop) {
  const auto fn = [](const Eigen::VectorXd& x) {
    const double a = x[0] - 1.5;
    const double b = x[1] + 0.5;
    return 2.0 * a * a + 0.5 * b * b + a * b;
  };
  Eigen::VectorXd x0(2), lo(2), hi(2);
  x0 << 4.0, 4.0;
  lo << -10.0, -10.0;
  hi << 10.0, 10.0;
  QuasiNewtonOptions opt;
  opt.grad_tol_per_dim = 1e-6;
  const QuasiNewtonResult res = bfgs_minimize(fn, x0, lo, hi, opt);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.reason, StopReason::gradient);
  EXPECT_NEAR(res.x[0], 1.5, 1e-5);
  EXPECT_NEAR(res.x[1], -0.5, 1e-5);
}

TEST(Bfgs, RosenbrockReachesTheValley) {
  const auto fn = [](const Eigen::VectorXd& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  Eigen::VectorXd x0(2), lo(2), hi(2);
  x0 << -1.2, 1.0;
  lo << -5.0, -5.0;
  hi << 5.0, 5.0;
  const QuasiNewtonResult res = bfgs_minimize(fn, x0, lo, hi);
  EXPECT_LE(res.f, 1e-8);
  EXPECT_NEAR(res.x[0], 1.0, 1e-3);
  EXPECT_NEAR(res.x[1], 1.0, 1e-3);
}

TEST(Bfgs, BoundaryMinimumStopsOnTheBox) {
  const auto fn = [](const Eigen::VectorXd& x) { return (x[0] + 2.0) * (x[0] + 2.0); };
  Eigen::VectorXd x0(1), lo(1), hi(1);
  x0 << 3.0;
  lo << 0.0;
  hi << 5.0;
  const QuasiNewtonResult res = bfgs_minimize(fn, x0, lo, hi);
  EXPECT_FALSE(res.converged);
  EXPECT_NEAR(res.x[0], 0.0, 1e-12);
  EXPECT_EQ(res.reason, StopReason::line_search);
}

} // namespace
} // namespace giicov
