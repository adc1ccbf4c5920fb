#pragma once

// The structural model zoo. Each model supplies a templated path simulator that runs
// under one of three policies:
//
//   DirectPolicy            plain simulation from raw uniforms (observed data, and
//                           the anchor pass, which can record the critical grids)
//   CovPolicy<S>            simulation through the change of variables against the
//                           recorded anchor grids, with S = double or a dual type
//
// The same templated body serves all policies, so the value components of a dual
// evaluation at theta = anchor are bitwise identical to the plain pass. Outcomes of
// the indicator models are plain doubles (the realized level is frozen by the anchor
// segment); outcomes of the sequential models (exponential autoregression, queue)
// are S-valued because the levels move differentiably with the parameter.
//
// Parameter layouts:
//   binary_ar              (gamma, rho)            binary probit with AR(1) errors
//   dynamic_binary         (gamma, alpha, rho)     adds the lagged choice
//   dynamic_binary_window  (gamma, alpha, rho)     same process, choices observed
//                                                  only in periods {3,4,5} of T=5
//   ordered_probit         (delta1, delta2, gamma, sigma), 3 outcome levels
//   exp_ar                 (mu, phi)               positive AR(1) with Bernoulli jumps
//   gg1_queue              (theta_v, theta_w)      single-server queue, exponential
//                                                  service/interarrival, outcome =
//                                                  inter-departure times

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "giicov/cov.hpp"
#include "giicov/data.hpp"
#include "giicov/dual.hpp"
#include "giicov/errors.hpp"
#include "giicov/normal.hpp"
#include "giicov/rng.hpp"

namespace giicov {

enum class ModelKind {
  binary_ar,
  dynamic_binary,
  dynamic_binary_window,
  ordered_probit,
  exp_ar,
  gg1_queue,
};

enum class AuxKind { panel_sur, pooled_ar, mixture };

struct ModelInfo {
  ModelKind kind;
  std::string name;
  int theta_dim;
  Eigen::VectorXd theta0;          // default truth, also the default start point
  Eigen::VectorXd lower, upper;    // box bounds
  std::vector<std::string> param_names;
  bool sequential_weights;         // cumulative weight products vs per-cell weights
  AuxKind aux;
  int default_n;                   // units (panel) / customers (queue) / 1 (series)
  int default_t;                   // periods per unit / series length
  int first_observed_period;       // 1 except for the restricted-window model (3)
};

const ModelInfo& model_info(ModelKind kind);
ModelKind model_from_name(const std::string& name); // throws config_error
const std::vector<ModelKind>& all_models();

// Box-bound and relational validation (threshold ordering, queue stability, phi
// strictly inside (0,1)). Throws std::invalid_argument with the offending component.
void validate_theta(ModelKind kind, const Eigen::VectorXd& theta);

// Covariate DGP shared by the panel models: scalar x ~ N(1,2).
inline double x_from_uniform(double u) {
  return 1.0 + std::sqrt(2.0) * inv_normal_cdf(u);
}

// ---------------------------------------------------------------------------
// Simulation policies
// ---------------------------------------------------------------------------

// Grids recorded by the anchor pass, in path visit order.
struct AnchorCache {
  std::vector<Grid<double>> grids;
};

// Plain simulation: raw draw kept, unit weight, segment located directly. Validates
// every grid (cheap at this grid size) so model bugs surface at the anchor pass.
struct DirectPolicy {
  AnchorCache* record = nullptr;

  CovResult<double> operator()(const Grid<double>& g, double u) {
    validate_grid(g);
    const int j = locate_segment(g, u);
    if (record) record->grids.push_back(g);
    return {u, 1.0, j};
  }
};

// Change-of-variables simulation against recorded anchor grids.
template <class S>
struct CovPolicy {
  const AnchorCache* cache = nullptr;
  std::size_t cursor = 0;

  CovResult<S> operator()(const Grid<S>& g, double u) {
    if (cache == nullptr || cursor >= cache->grids.size()) {
      throw contract_error("CovPolicy: anchor cache exhausted or missing");
    }
    return cov_transform(cache->grids[cursor++], g, u);
  }
};

// ---------------------------------------------------------------------------
// Path simulators
// ---------------------------------------------------------------------------

// CDF-valued cut points saturate in double precision: Phi(-idx) rounds to exactly
// 1.0 once idx <= -8.3, underflows to 0.0 in the far opposite tail, and
// -expm1(-e/theta) rounds to 1.0 once e/theta exceeds about 37. A saturated cut
// collapses a grid segment to zero width, which the validator rightly rejects.
// Clamp every interior cut into the open unit interval and restore strict ordering
// where rounding has merged adjacent cuts. All decisions read values only, so plain
// and dual runs branch identically; a repaired cut becomes a constant, which is
// exact to double resolution since the true slope at a saturated point is below
// one ulp.
inline void repair_cut(double& c, double fixed) { c = fixed; }
inline void repair_cut(Dual1& c, double fixed) { c = Dual1(fixed); }
inline void repair_cut(Dual2& c, double fixed) { c = Dual2(fixed); }

template <class S>
void repair_interior_cuts(Grid<S>& g) {
  const int m = g.size - 2;
  double lo = std::numeric_limits<double>::min();
  for (int j = 1; j <= m; ++j) {
    if (value(g.c[j]) < lo) repair_cut(g.c[j], lo);
    lo = std::nextafter(value(g.c[j]), 2.0);
  }
  double hi = std::nextafter(1.0, 0.0);
  for (int j = m; j >= 1; --j) {
    if (value(g.c[j]) > hi) repair_cut(g.c[j], hi);
    hi = std::nextafter(value(g.c[j]), 0.0);
  }
}

// A transformed draw can round onto an endpoint of the unit interval when its
// anchor segment has collapsed to the resolution of doubles (extreme anchors push
// cuts against 1). The shock map needs a strictly interior argument, so pull such a
// draw onto the nearest representable interior value; plain and dual evaluations
// clamp the same value component, keeping their branches identical.
inline double interior_uniform(double u) {
  return std::min(std::max(u, std::numeric_limits<double>::min()),
                  std::nextafter(1.0, 0.0));
}
inline Dual1 interior_uniform(Dual1 u) {
  u.v = interior_uniform(u.v);
  return u;
}
inline Dual2 interior_uniform(Dual2 u) {
  u.v = interior_uniform(u.v);
  return u;
}

// Binary panel family. Latent v_t = rho v_{t-1} + Phi^-1(u'), v_0 = 0; threshold
// c1_t = Phi(-(alpha y_{t-1} + gamma x_t + rho v_{t-1})) with y_0 = 0. The first
// model passes a zero-dimensional alpha, which reproduces the two-parameter process
// bit for bit. Writes y in {0,1} and the per-cell weights.
template <class S, class Policy>
void binary_panel_unit(const S& gamma, const S& alpha, const S& rho, const double* x,
                       int t_len, const double* u, Policy& pol, double* y, S* w) {
  S v = 0.0;
  double lag = 0.0;
  for (int t = 0; t < t_len; ++t) {
    const S idx = alpha * lag + (gamma * x[t] + rho * v);
    Grid<S> g;
    g.c[0] = S(0.0);
    g.c[1] = normal_cdf(-idx);
    g.c[2] = S(1.0);
    g.size = 3;
    repair_interior_cuts(g);
    const auto res = pol(g, u[t]);
    y[t] = res.segment == 1 ? 1.0 : 0.0;
    w[t] = res.w;
    lag = y[t];
    v = rho * v + inv_normal_cdf(interior_uniform(res.u));
  }
}

// Ordered probit with a per-unit normal effect v (drawn untransformed from u_v) and
// J interior thresholds delta[0..J-1]. Outcome level equals the segment index.
template <class S, class Policy>
void ordered_probit_unit(const S* delta, int j_count, const S& gamma, const S& sigma,
                         const double* x, int t_len, double u_v, const double* u,
                         Policy& pol, double* y, S* w) {
  const double v = inv_normal_cdf(u_v);
  for (int t = 0; t < t_len; ++t) {
    const S base = gamma * x[t] + sigma * v;
    Grid<S> g;
    g.c[0] = S(0.0);
    for (int j = 0; j < j_count; ++j) g.c[1 + j] = normal_cdf(delta[j] - base);
    g.c[1 + j_count] = S(1.0);
    g.size = j_count + 2;
    repair_interior_cuts(g);
    const auto res = pol(g, u[t]);
    y[t] = static_cast<double>(res.segment);
    w[t] = res.w;
  }
}

// Exponential autoregression y_t = phi y_{t-1} + mu v_t 1[u_t <= phi], y_0 = 0, with
// v_t standard exponential drawn from the second uniform stream. The indicator's
// critical grid is (0, phi, 1); the jump draw itself needs no transformation. Step
// weights are written per period; the moment assembly multiplies them cumulatively.
template <class S, class Policy>
void exp_ar_path(const S& mu, const S& phi, int t_len, const double* u, const double* u2,
                 Policy& pol, S* y, S* w) {
  S yprev = 0.0;
  for (int t = 0; t < t_len; ++t) {
    Grid<S> g;
    g.c[0] = S(0.0);
    g.c[1] = phi;
    g.c[2] = S(1.0);
    g.size = 3;
    repair_interior_cuts(g);
    const auto res = pol(g, u[t]);
    const double v = -std::log1p(-u2[t]);
    if (res.segment == 0) {
      y[t] = phi * yprev + mu * v;
    } else {
      y[t] = phi * yprev;
    }
    w[t] = res.w;
    yprev = y[t];
  }
}

// Single-server queue with exponential service (mean theta_v) and interarrival
// (mean theta_w) times; outcome is the inter-departure path y_i = D_i - D_{i-1}.
// Customer i >= 2 finds the server busy when its interarrival uniform falls below
// F_w(e_i) with e_i the previous customer's sojourn; that comparison's critical grid
// is (0, F_w(e_i; theta_w), 1). The first customer arrives at time zero to an empty
// system (its arrival uniform is burned to keep streams aligned). Event times follow
// the same floating-point shape as a discrete-event simulation, so the plain path
// agrees with one bitwise.
template <class S, class Policy>
void gg1_queue_path(const S& theta_v, const S& theta_w, int n, const double* u_service,
                    const double* u_arrival, Policy& pol, S* y, S* w) {
  S a = 0.0; // arrival time of the current customer
  S d = 0.0; // departure time of the previous customer
  S e = 0.0; // sojourn of the previous customer, D_{i-1} - a_{i-1}
  for (int i = 0; i < n; ++i) {
    const S v = -(theta_v * log1p(-u_service[i]));
    if (i == 0) {
      y[0] = v;
      w[0] = 1.0;
      d = v;
      e = v;
      continue;
    }
    Grid<S> g;
    g.c[0] = S(0.0);
    g.c[1] = -expm1(-(e / theta_w));
    g.c[2] = S(1.0);
    g.size = 3;
    repair_interior_cuts(g);
    const auto res = pol(g, u_arrival[i]);
    const S gap = -(theta_w * log1p(-interior_uniform(res.u)));
    const S a_new = a + gap;
    S d_new;
    if (res.segment == 0) {
      d_new = d + v; // busy on arrival: service starts at the previous departure
    } else {
      d_new = a_new + v; // idle: service starts immediately
    }
    y[i] = d_new - d;
    w[i] = res.w;
    e = d_new - a_new;
    a = a_new;
    d = d_new;
  }
}

// ---------------------------------------------------------------------------
// Observed-data generation
// ---------------------------------------------------------------------------

// Simulates one observed dataset from the true process in plain arithmetic.
// n = units (panel models), customers (queue), or ignored (exp_ar uses one series);
// t_len = periods per unit or series length (ignored by the queue). The restricted
// window model simulates T = 5 periods and exports only t in {3,4,5}.
PanelData simulate_observed(ModelKind kind, const Eigen::VectorXd& theta,
                            std::uint64_t master_seed, std::uint64_t replication, int n,
                            int t_len);

} // namespace giicov
