// Nelder-Mead simplex iteration in the Lagarias et al. form used by the common
// simplex routines: order, reflect, and then expand, contract outside, contract
// inside, or shrink toward the best vertex.

#include "giicov/neldermead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace giicov {
namespace {

double guarded_eval(const std::function<double(const Eigen::VectorXd&)>& fn,
                    const Eigen::VectorXd& x, int& evals) {
  ++evals;
  const double v = fn(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

double simplex_diameter(const std::vector<Eigen::VectorXd>& xs) {
  double dia = 0.0;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t b = a + 1; b < xs.size(); ++b) {
      dia = std::max(dia, (xs[a] - xs[b]).lpNorm<Eigen::Infinity>());
    }
  }
  return dia;
}

} // namespace

NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& fn,
    const Eigen::VectorXd& x0, const NelderMeadOptions& opt) {
  const int d = static_cast<int>(x0.size());
  const int budget = opt.evals_per_dim * d;

  std::vector<Eigen::VectorXd> xs(d + 1, x0);
  for (int k = 0; k < d; ++k) {
    const double step = x0[k] != 0.0 ? 0.05 * std::abs(x0[k]) : 2.5e-4;
    xs[k + 1][k] += step;
  }
  std::vector<double> fs(d + 1);
  int evals = 0;
  for (int j = 0; j <= d; ++j) fs[j] = guarded_eval(fn, xs[j], evals);

  std::vector<int> ord(d + 1);
  const auto sort_vertices = [&] {
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(),
                     [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Eigen::VectorXd> nx(d + 1);
    std::vector<double> nf(d + 1);
    for (int j = 0; j <= d; ++j) {
      nx[j] = xs[ord[j]];
      nf[j] = fs[ord[j]];
    }
    xs.swap(nx);
    fs.swap(nf);
  };
  sort_vertices();

  while (evals < budget && simplex_diameter(xs) > opt.diameter_tol) {
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) centroid += xs[j];
    centroid /= static_cast<double>(d);

    const Eigen::VectorXd xr = centroid + (centroid - xs[d]);
    const double fr = guarded_eval(fn, xr, evals);

    if (fr < fs[0]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[d]);
      const double fe = guarded_eval(fn, xe, evals);
      if (fe < fr) {
        xs[d] = xe;
        fs[d] = fe;
      } else {
        xs[d] = xr;
        fs[d] = fr;
      }
    } else if (fr < fs[d - 1]) {
      xs[d] = xr;
      fs[d] = fr;
    } else {
      bool shrink = true;
      if (fr < fs[d]) {
        const Eigen::VectorXd xc = centroid + 0.5 * (xr - centroid);
        const double fc = guarded_eval(fn, xc, evals);
        if (fc <= fr) {
          xs[d] = xc;
          fs[d] = fc;
          shrink = false;
        }
      } else {
        const Eigen::VectorXd xc = centroid - 0.5 * (centroid - xs[d]);
        const double fc = guarded_eval(fn, xc, evals);
        if (fc < fs[d]) {
          xs[d] = xc;
          fs[d] = fc;
          shrink = false;
        }
      }
      if (shrink) {
        for (int j = 1; j <= d; ++j) {
          xs[j] = xs[0] + 0.5 * (xs[j] - xs[0]);
          fs[j] = guarded_eval(fn, xs[j], evals);
        }
      }
    }
    sort_vertices();
  }

  NelderMeadResult res;
  res.x = xs[0];
  res.f = fs[0];
  res.evaluations = evals;
  res.diameter = simplex_diameter(xs);
  return res;
}

} // namespace giicov
