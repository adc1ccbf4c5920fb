// Simplex minimizer: classic smooth benchmarks, budget and diameter stopping, and
// a run on the direct panel criterion, which is a step function the derivative
// solvers cannot search.

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "giicov/estimate.hpp"
#include "giicov/models.hpp"
#include "giicov/neldermead.hpp"
#include "giicov/problem.hpp"

namespace giicov {
namespace {

TEST(NelderMead, ConvexQuadraticReachesTheMinimizer) {
  const auto fn = [](const Eigen::VectorXd& x) {
    const double a = x[0] - 1.5;
    const double b = x[1] + 0.5;
    return 2.0 * a * a + 0.5 * b * b + a * b;
  };
  Eigen::VectorXd x0(2);
  x0 << 4.0, 4.0;
  const NelderMeadResult res = nelder_mead_minimize(fn, x0);
  // Minimizer of the quadratic: gradient zero at (a, b) solving
  // [4 1; 1 1][a b]' = 0, so a = b = 0.
  EXPECT_NEAR(res.x[0], 1.5, 1e-4);
  EXPECT_NEAR(res.x[1], -0.5, 1e-4);
  EXPECT_LE(res.diameter, 1e-6);
  EXPECT_LE(res.evaluations, 1000);
}

TEST(NelderMead, RosenbrockFromTheClassicStart) {
  const auto fn = [](const Eigen::VectorXd& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const NelderMeadResult res = nelder_mead_minimize(fn, x0);
  EXPECT_LE(res.f, 1e-6);
  EXPECT_NEAR(res.x[0], 1.0, 1e-2);
  EXPECT_NEAR(res.x[1], 1.0, 1e-2);
}

TEST(NelderMead, BudgetStopsTheSearchOnAFlatlessSlope) {
  // A linear objective never forms a basin, so only the evaluation budget can end
  // the search.
  const auto fn = [](const Eigen::VectorXd& x) { return x[0] + 2.0 * x[1]; };
  Eigen::VectorXd x0(2);
  x0 << 0.0, 0.0;
  NelderMeadOptions opt;
  opt.evals_per_dim = 50;
  const NelderMeadResult res = nelder_mead_minimize(fn, x0, opt);
  EXPECT_GE(res.evaluations, 100);
  EXPECT_LE(res.evaluations, 110);
  EXPECT_GT(res.diameter, opt.diameter_tol);
}

TEST(NelderMead, NonFiniteRegionsActAsWalls) {
  const auto fn = [](const Eigen::VectorXd& x) {
    if (x[0] < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (x[0] - 0.2) * (x[0] - 0.2) + x[1] * x[1];
  };
  Eigen::VectorXd x0(2);
  x0 << 1.0, 1.0;
  const NelderMeadResult res = nelder_mead_minimize(fn, x0);
  EXPECT_GE(res.x[0], 0.0);
  EXPECT_NEAR(res.x[0], 0.2, 1e-3);
  EXPECT_NEAR(res.x[1], 0.0, 1e-3);
}

TEST(NelderMead, DirectPanelCriterionSettlesNearTheTruth) {
  const ModelKind kind = ModelKind::binary_ar;
  const ModelInfo& mi = model_info(kind);
  const PanelData data = simulate_observed(kind, mi.theta0, 2024, 0, 200, 5);
  ProblemOptions popt;
  popt.master_seed = 2024;
  popt.replications = 10;
  const CovProblem p(kind, data, popt);
  const auto fn = [&p](const Eigen::VectorXd& th) { return p.anchored_value(th); };
  const NelderMeadResult res = nelder_mead_minimize(fn, mi.theta0);
  EXPECT_LT(std::abs(res.x[0] - mi.theta0[0]), 0.15);
  EXPECT_LT(std::abs(res.x[1] - mi.theta0[1]), 0.15);
  EXPECT_LE(res.f, fn(mi.theta0));
}

} // namespace
} // namespace giicov
