// Method dispatcher: every method produces a complete result record on the same
// dataset, name parsing round-trips, cold starts come from the grid scan, and the
// two-step schedule actually runs both stages.

#include <cmath>

#include <gtest/gtest.h>

#include "giicov/errors.hpp"
#include "giicov/estimate.hpp"
#include "giicov/models.hpp"

namespace giicov {
namespace {

EstimateOptions base_options(std::uint64_t seed, int replications) {
  EstimateOptions opt;
  opt.problem.master_seed = seed;
  opt.problem.replications = replications;
  return opt;
}

TEST(Estimate, MethodNamesRoundTrip) {
  for (const MethodKind m : {MethodKind::giicov, MethodKind::giicov_fd, MethodKind::gii1,
                             MethodKind::gii2, MethodKind::nelder_mead}) {
    EXPECT_EQ(method_from_name(method_name(m)), m);
  }
  EXPECT_THROW(method_from_name("simulated-annealing"), config_error);
}

TEST(Estimate, EveryMethodFillsTheResultRecord) {
  const ModelKind kind = ModelKind::binary_ar;
  const ModelInfo& mi = model_info(kind);
  const PanelData data = simulate_observed(kind, mi.theta0, 11, 0, 80, 5);
  for (const MethodKind m : {MethodKind::giicov, MethodKind::giicov_fd, MethodKind::gii1,
                             MethodKind::gii2, MethodKind::nelder_mead}) {
    EstimateOptions opt = base_options(11, 5);
    opt.method = m;
    opt.gii2_replications = 20;
    const Eigen::VectorXd start = mi.theta0;
    const EstimationResult res = estimate(kind, data, opt, &start);
    SCOPED_TRACE(method_name(m));
    EXPECT_EQ(res.model, "binary_ar");
    EXPECT_EQ(res.method, method_name(m));
    ASSERT_EQ(res.theta.size(), 2);
    EXPECT_TRUE(std::isfinite(res.q));
    EXPECT_FALSE(res.stop_reason.empty());
    EXPECT_GT(res.iterations, 0);
    EXPECT_GE(res.elapsed_seconds, 0.0);
    ASSERT_EQ(res.se.size(), 2);
    ASSERT_EQ(res.ci95.rows(), 2);
    for (int k = 0; k < 2; ++k) {
      EXPECT_GT(res.se[k], 0.0);
      EXPECT_DOUBLE_EQ(res.ci95(k, 0), res.theta[k] - 1.959964 * res.se[k]);
      EXPECT_DOUBLE_EQ(res.ci95(k, 1), res.theta[k] + 1.959964 * res.se[k]);
      EXPECT_LT(std::abs(res.theta[k] - mi.theta0[k]), 0.5);
    }
    if (res.converged) {
      EXPECT_EQ(res.stop_reason, "gradient");
    }
  }
}

TEST(Estimate, ColdStartUsesTheGridScan) {
  const ModelKind kind = ModelKind::binary_ar;
  const ModelInfo& mi = model_info(kind);
  const PanelData data = simulate_observed(kind, mi.theta0, 29, 0, 100, 5);
  EstimateOptions opt = base_options(29, 5);
  const EstimationResult res = estimate(kind, data, opt, nullptr);
  EXPECT_LT(std::abs(res.theta[0] - mi.theta0[0]), 0.5);
  EXPECT_LT(std::abs(res.theta[1] - mi.theta0[1]), 0.5);
}

TEST(Estimate, StartOutsideTheBoxIsClamped) {
  const ModelKind kind = ModelKind::binary_ar;
  const ModelInfo& mi = model_info(kind);
  const PanelData data = simulate_observed(kind, mi.theta0, 13, 0, 60, 5);
  EstimateOptions opt = base_options(13, 3);
  opt.compute_se = false;
  Eigen::VectorXd start(2);
  start << 40.0, 40.0;
  const EstimationResult res = estimate(kind, data, opt, &start);
  EXPECT_LE(res.theta[0], mi.upper[0]);
  EXPECT_LE(res.theta[1], mi.upper[1]);

  Eigen::VectorXd bad(3);
  bad << 1.0, 1.0, 1.0;
  EXPECT_THROW(estimate(kind, data, opt, &bad), config_error);
}

TEST(Estimate, TwoStepScheduleRunsBothStages) {
  const ModelKind kind = ModelKind::binary_ar;
  const ModelInfo& mi = model_info(kind);
  const PanelData data = simulate_observed(kind, mi.theta0, 47, 0, 80, 5);
  EstimateOptions opt = base_options(47, 5);
  opt.method = MethodKind::gii2;
  opt.gii2_replications = 15;
  const Eigen::VectorXd start = mi.theta0;
  const EstimationResult res = estimate(kind, data, opt, &start);
  EXPECT_GE(res.iterations, 2);
  EXPECT_LT(std::abs(res.theta[0] - mi.theta0[0]), 0.5);
  EXPECT_LT(std::abs(res.theta[1] - mi.theta0[1]), 0.5);
}

TEST(Estimate, SkippingStandardErrorsLeavesThemEmpty) {
  const ModelKind kind = ModelKind::binary_ar;
  const ModelInfo& mi = model_info(kind);
  const PanelData data = simulate_observed(kind, mi.theta0, 3, 0, 40, 5);
  EstimateOptions opt = base_options(3, 2);
  opt.compute_se = false;
  const Eigen::VectorXd start = mi.theta0;
  const EstimationResult res = estimate(kind, data, opt, &start);
  EXPECT_EQ(res.se.size(), 0);
  EXPECT_EQ(res.ci95.size(), 0);
}

} // namespace
} // namespace giicov
