#include "giicov/aux_sur.hpp"

#include <string>

#include "giicov/errors.hpp"

namespace giicov {

SurDesign SurDesign::panel(const PanelData& data, int levels) {
  if (data.n_units() == 0) throw data_error("panel design: no units");
  if (data.n_x < 1) throw data_error("panel design: needs at least one covariate column");
  if (levels < 1) throw data_error("panel design: levels must be positive");
  const std::vector<int>& window = data.times[0];
  if (window.size() < 2) throw data_error("panel design: window must have at least 2 periods");
  if (!data.has_uniform_window(window)) {
    throw data_error("panel design: all units must share the same time window");
  }

  const int k_len = static_cast<int>(window.size());
  SurDesign d;
  d.levels_ = levels;
  d.d_beta_ = levels * (2 + 4 * (k_len - 1));

  // Equation (period, level) owns a block of the stacked coefficient vector,
  // period-major. With a single level the response is the outcome itself; with
  // several, level j's response is the indicator of outcome level j.
  std::vector<std::vector<int>> offset(k_len, std::vector<int>(levels));
  {
    int off = 0;
    for (int k = 0; k < k_len; ++k) {
      const int width = k == 0 ? 2 : 4;
      for (int j = 0; j < levels; ++j) {
        offset[k][j] = off;
        off += width;
      }
    }
  }

  for (int i = 0; i < data.n_units(); ++i) {
    std::vector<Eigen::VectorXd> zi;
    std::vector<double> yi;
    std::vector<int> periods, lvls, offs, widths;
    for (int k = 0; k < k_len; ++k) {
      const int width = k == 0 ? 2 : 4;
      for (int j = 0; j < levels; ++j) {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(d.d_beta_);
        const int off = offset[k][j];
        if (k == 0) {
          z[off + 0] = 1.0;
          z[off + 1] = data.x[i][0][0];
        } else {
          z[off + 0] = 1.0;
          z[off + 1] = data.x[i][k][0];
          z[off + 2] = data.x[i][k - 1][0];
          z[off + 3] = data.y[i][k - 1];
        }
        zi.push_back(std::move(z));
        const double y = data.y[i][k];
        yi.push_back(levels == 1 ? y : (y == static_cast<double>(j + 1) ? 1.0 : 0.0));
        periods.push_back(k);
        lvls.push_back(levels == 1 ? 0 : j + 1);
        offs.push_back(off);
        widths.push_back(width);
      }
    }
    d.z_.push_back(std::move(zi));
    d.y_obs_.push_back(std::move(yi));
    d.row_period_.push_back(std::move(periods));
    d.row_level_.push_back(std::move(lvls));
    d.eq_offset_.push_back(std::move(offs));
    d.eq_width_.push_back(std::move(widths));
  }
  d.finalize();
  return d;
}

SurDesign SurDesign::pooled_ar(const PanelData& data) {
  if (data.n_units() != 1) {
    throw data_error("pooled_ar design: expected a single series, got " +
                     std::to_string(data.n_units()) + " units");
  }
  const int t_len = static_cast<int>(data.times[0].size());
  if (t_len < 3) throw data_error("pooled_ar design: series too short");

  SurDesign d;
  d.levels_ = 1;
  d.d_beta_ = 2;
  for (int t = 1; t < t_len; ++t) {
    Eigen::VectorXd z(2);
    z << 1.0, data.y[0][t - 1];
    d.z_.push_back({std::move(z)});
    d.y_obs_.push_back({data.y[0][t]});
    d.row_period_.push_back({t});
    d.row_level_.push_back({0});
    d.eq_offset_.push_back({0});
    d.eq_width_.push_back({2});
  }
  d.finalize();
  return d;
}

void SurDesign::finalize() {
  gram_ = Eigen::MatrixXd::Zero(d_beta_, d_beta_);
  for (const auto& block : z_) {
    for (const auto& z : block) gram_ += z * z.transpose();
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram_);
  const Eigen::VectorXd diag = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success ||
      diag.minCoeff() < 1e-12 * std::max(1.0, diag.maxCoeff())) {
    throw data_error("auxiliary design is collinear: instrument Gram matrix is singular");
  }
  gram_inverse_ = ldlt.solve(Eigen::MatrixXd::Identity(d_beta_, d_beta_));
}

Eigen::VectorXd SurDesign::fit() const {
  Eigen::VectorXd zy = Eigen::VectorXd::Zero(d_beta_);
  for (int b = 0; b < n_blocks(); ++b) {
    for (int k = 0; k < rows_in_block(b); ++k) zy += z_[b][k] * y_obs_[b][k];
  }
  return gram_inverse_ * zy;
}

Eigen::VectorXd SurDesign::moment_block(int b, const double* y_vals,
                                        const Eigen::VectorXd& beta) const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(d_beta_);
  for (int k = 0; k < rows_in_block(b); ++k) {
    m += z_[b][k] * (y_vals[k] - z_[b][k].dot(beta));
  }
  return m;
}

} // namespace giicov
