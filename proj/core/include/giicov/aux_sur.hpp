#pragma once

// Linear auxiliary models. The estimator matches observed and simulated data through
// the moment conditions of an auxiliary regression; this class holds the design built
// from the dataset it was constructed on. Two designs cover the panel and time-series
// cases:
//
//   panel:     one equation per window position (times response levels for multi-
//              level outcomes). The first observed period has z = (1, x_t); every
//              later one z = (1, x_t, x_{t-1}, y_{t-1}) with the dataset's own lag.
//              Coefficients stack across equations. With levels > 1 each period
//              carries one equation per outcome level j, sharing the same z and
//              responding to the indicator 1[y = j].
//   pooled_ar: a single equation over time steps of one series, z_t = (1, y_{t-1}),
//              starting at the second observation.
//
// Instruments are stored stacked: each row's z vector has length d_beta with its
// equation's block filled in, so the whole system is one block-diagonal regression.

#include <vector>

#include <Eigen/Dense>

#include "giicov/data.hpp"

namespace giicov {

class SurDesign {
public:
  // An empty design; usable only as a placeholder until assigned from a factory.
  SurDesign() = default;

  static SurDesign panel(const PanelData& data, int levels = 1);
  static SurDesign pooled_ar(const PanelData& data);

  int d_beta() const { return d_beta_; }
  int levels() const { return levels_; }

  // Independent moment blocks: units for the panel design, time steps for pooled_ar.
  // The central limit aggregation and the outer-product variance run over blocks.
  int n_blocks() const { return static_cast<int>(z_.size()); }
  int rows_in_block(int b) const { return static_cast<int>(z_[b].size()); }

  const Eigen::VectorXd& z(int b, int k) const { return z_[b][k]; }
  double y_obs(int b, int k) const { return y_obs_[b][k]; }

  // Row metadata for simulated-moment assembly: which observed period (0-based
  // window position; pooled_ar: series time index) supplies the row's response,
  // which outcome level it responds to (0 = the raw outcome), and the row's
  // equation slice within the stacked coefficient vector.
  int row_period(int b, int k) const { return row_period_[b][k]; }
  int row_level(int b, int k) const { return row_level_[b][k]; }
  int eq_offset(int b, int k) const { return eq_offset_[b][k]; }
  int eq_width(int b, int k) const { return eq_width_[b][k]; }

  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& gram_inverse() const { return gram_inverse_; }

  // OLS on the observed outcomes.
  Eigen::VectorXd fit() const;

  // Moment contribution of one block: sum_k z_bk (y_bk - z_bk' beta), where y values
  // are supplied by the caller (observed or simulated).
  Eigen::VectorXd moment_block(int b, const double* y_vals, const Eigen::VectorXd& beta) const;

private:
  void finalize();

  int d_beta_ = 0;
  int levels_ = 1;
  std::vector<std::vector<Eigen::VectorXd>> z_;
  std::vector<std::vector<double>> y_obs_;
  std::vector<std::vector<int>> row_period_, row_level_, eq_offset_, eq_width_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd gram_inverse_;
};

} // namespace giicov
