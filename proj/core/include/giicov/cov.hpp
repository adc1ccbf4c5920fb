#pragma once

// The change of variables at the center of the estimator. A simulated outcome that
// jumps when a uniform draw u crosses a parameter-dependent critical point is made
// differentiable by re-expressing u relative to a fixed anchor parameter: the segment
// of the anchor grid containing u is mapped affinely onto the corresponding segment of
// the grid at the evaluation parameter. The outcome computed from the transformed
// draw then moves continuously in the parameter, and the segment (hence the outcome's
// discrete branch) never changes. The Jacobian of the map, the ratio of segment
// widths, multiplies the simulated moment so expectations are preserved.
//
// Scalar type S is double (value-only evaluation) or a dual type (derivatives). The
// anchor grid is always plain doubles: it is held fixed while the parameter moves.

#include <array>
#include <cmath>
#include <string>

#include "giicov/dual.hpp"
#include "giicov/errors.hpp"

namespace giicov {

// Anchor segments narrower than this cannot be divided by.
inline constexpr double kSegmentFloor = 1e-12;

// Grid capacity: both endpoints 0 and 1 plus up to 8 interior critical points.
inline constexpr int kMaxGridPoints = 10;

template <class S>
struct Grid {
  std::array<S, kMaxGridPoints> c{};
  int size = 0;

  static Grid from(std::initializer_list<S> points) {
    Grid g;
    for (const S& p : points) g.c[g.size++] = p;
    return g;
  }
};

template <class S>
struct CovResult {
  S u;         // transformed uniform draw
  S w;         // Jacobian weight (ratio of segment widths)
  int segment; // segment index under the anchor grid
};

// Checks a grid is a valid partition of [0,1]: starts at 0, ends at 1, strictly
// increasing. Used on anchor grids, where a violation means a model produced
// out-of-order critical points.
void validate_grid(const double* c, int size);

inline void validate_grid(const Grid<double>& g) { validate_grid(g.c.data(), g.size); }

// Index j of the segment (c[j], c[j+1]] containing u. Requires 0 < u <= 1 and a valid
// grid; throws contract_error otherwise.
int locate_segment(const double* c, int size, double u);

inline int locate_segment(const Grid<double>& g, double u) {
  return locate_segment(g.c.data(), g.size, u);
}

// set_value overwrites only the value component, leaving derivatives untouched.
inline void set_value(double& x, double v) { x = v; }
inline void set_value(Dual1& x, double v) { x.v = v; }
inline void set_value(Dual2& x, double v) { x.v = v; }

// Maps u through the segment-wise affine change of variables. anchor_c is the grid at
// the anchor parameter, theta_c the grid at the evaluation parameter (same shape; the
// number of critical points does not depend on the parameter). Throws
// degenerate_segment_error if the containing anchor segment is narrower than
// kSegmentFloor.
//
// When the evaluation grid's bracketing endpoints are bitwise equal to the anchor's
// (in particular when theta equals the anchor), the weight is exactly 1 by IEEE
// division and the transformed value is set to u itself, which is the exact value of
// the affine map with equal endpoints. Otherwise the transformed value is nudged
// into (c[j], c[j+1]] at theta if rounding pushed it out by an ulp, so downstream
// segment logic sees a consistent draw.
template <class S>
CovResult<S> cov_transform(const double* anchor_c, const S* theta_c, int size, double u) {
  const int j = locate_segment(anchor_c, size, u);
  const double lo_a = anchor_c[j];
  const double hi_a = anchor_c[j + 1];
  const double width_a = hi_a - lo_a;
  if (!(width_a >= kSegmentFloor)) {
    throw degenerate_segment_error("cov_transform: anchor segment " + std::to_string(j) +
                                   " has width " + std::to_string(width_a));
  }

  const S& lo_t = theta_c[j];
  const S& hi_t = theta_c[j + 1];

  CovResult<S> out;
  out.segment = j;
  out.w = (hi_t - lo_t) / width_a;
  out.u = lo_t + out.w * (u - lo_a);

  if (value(lo_t) == lo_a && value(hi_t) == hi_a) {
    set_value(out.u, u);
  } else {
    // Keep the value inside the half-open target segment.
    const double lo_v = value(lo_t);
    const double hi_v = value(hi_t);
    if (value(out.u) > hi_v) set_value(out.u, hi_v);
    if (value(out.u) <= lo_v) set_value(out.u, std::nextafter(lo_v, 2.0));
  }
  return out;
}

template <class S>
CovResult<S> cov_transform(const Grid<double>& anchor, const Grid<S>& theta, double u) {
  if (anchor.size != theta.size) {
    throw contract_error("cov_transform: grid shapes differ");
  }
  return cov_transform(anchor.c.data(), theta.c.data(), anchor.size, u);
}

} // namespace giicov
