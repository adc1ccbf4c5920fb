#include "giicov/data.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "giicov/errors.hpp"

namespace giicov {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // Trim surrounding spaces; embedded quoting is not supported or needed here.
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, int line_no, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw data_error("line " + std::to_string(line_no) + ": cannot parse " + what + " '" +
                     s + "'");
  }
  return v;
}

long long parse_int(const std::string& s, int line_no, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw data_error("line " + std::to_string(line_no) + ": cannot parse " + what + " '" +
                     s + "'");
  }
  return v;
}

} // namespace

int PanelData::n_rows() const {
  int total = 0;
  for (const auto& t : times) total += static_cast<int>(t.size());
  return total;
}

bool PanelData::has_uniform_window(const std::vector<int>& window) const {
  for (const auto& t : times) {
    if (t != window) return false;
  }
  return true;
}

PanelData load_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line)) throw data_error("'" + path + "' is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "unit" || header[1] != "time" || header[2] != "y") {
    throw data_error("'" + path + "': header must start with unit,time,y");
  }
  const int n_x = static_cast<int>(header.size()) - 3;
  for (int k = 0; k < n_x; ++k) {
    const std::string expected = "x" + std::to_string(k + 1);
    if (header[3 + k] != expected) {
      throw data_error("'" + path + "': covariate column " + std::to_string(k + 4) +
                       " must be named " + expected + ", got '" + header[3 + k] + "'");
    }
  }

  struct Row {
    double y;
    Eigen::VectorXd x;
  };
  std::map<long long, std::map<int, Row>> by_unit;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (static_cast<int>(f.size()) != 3 + n_x) {
      throw data_error("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(3 + n_x) + " fields, got " + std::to_string(f.size()));
    }
    const long long unit = parse_int(f[0], line_no, "unit");
    const int time = static_cast<int>(parse_int(f[1], line_no, "time"));
    Row row;
    row.y = parse_double(f[2], line_no, "y");
    row.x.resize(n_x);
    for (int k = 0; k < n_x; ++k) row.x[k] = parse_double(f[3 + k], line_no, "x" + std::to_string(k + 1));
    const auto [it, inserted] = by_unit[unit].emplace(time, std::move(row));
    (void)it;
    if (!inserted) {
      throw data_error("line " + std::to_string(line_no) + ": duplicate (unit,time) = (" +
                       std::to_string(unit) + "," + std::to_string(time) + ")");
    }
  }

  PanelData out;
  out.n_x = n_x;
  for (auto& [unit, rows] : by_unit) {
    out.unit_ids.push_back(unit);
    std::vector<int> t;
    std::vector<double> y;
    std::vector<Eigen::VectorXd> x;
    for (auto& [time, row] : rows) {
      t.push_back(time);
      y.push_back(row.y);
      x.push_back(std::move(row.x));
    }
    out.times.push_back(std::move(t));
    out.y.push_back(std::move(y));
    out.x.push_back(std::move(x));
  }
  if (out.unit_ids.empty()) throw data_error("'" + path + "' has a header but no rows");
  return out;
}

void save_panel_csv(const std::string& path, const PanelData& data) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open '" + path + "' for writing");
  out << "unit,time,y";
  for (int k = 0; k < data.n_x; ++k) out << ",x" << (k + 1);
  out << "\n";
  char buf[64];
  for (int i = 0; i < data.n_units(); ++i) {
    for (std::size_t k = 0; k < data.times[i].size(); ++k) {
      out << data.unit_ids[i] << ',' << data.times[i][k];
      std::snprintf(buf, sizeof buf, "%.17g", data.y[i][k]);
      out << ',' << buf;
      for (int j = 0; j < data.n_x; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", data.x[i][k][j]);
        out << ',' << buf;
      }
      out << '\n';
    }
  }
  if (!out) throw data_error("failed while writing '" + path + "'");
}

} // namespace giicov
