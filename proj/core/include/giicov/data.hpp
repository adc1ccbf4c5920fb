#pragma once

// Observed dataset container and CSV round trip. Layout on disk is one row per
// (unit, time) pair with header unit,time,y,x1,...,x_dx; in memory rows are grouped
// by unit and sorted by time. Panels may be unbalanced in principle; the models
// validate the window shape they need.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace giicov {

struct PanelData {
  std::vector<long long> unit_ids;            // ascending
  std::vector<std::vector<int>> times;        // times[i], ascending within unit
  std::vector<std::vector<double>> y;         // y[i][k] for times[i][k]
  std::vector<std::vector<Eigen::VectorXd>> x; // x[i][k], each of length n_x
  int n_x = 0;

  int n_units() const { return static_cast<int>(unit_ids.size()); }
  int n_rows() const;

  // True when every unit has exactly the given time points.
  bool has_uniform_window(const std::vector<int>& window) const;
};

// Reads a panel CSV. Throws data_error on unreadable files, malformed headers or
// fields, and duplicate (unit, time) pairs.
PanelData load_panel_csv(const std::string& path);

// Writes a panel CSV with full double precision.
void save_panel_csv(const std::string& path, const PanelData& data);

} // namespace giicov
