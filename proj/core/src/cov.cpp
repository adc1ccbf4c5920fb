#include "giicov/cov.hpp"

#include <algorithm>
#include <string>

namespace giicov {

void validate_grid(const double* c, int size) {
  if (size < 2 || size > kMaxGridPoints) {
    throw contract_error("validate_grid: size " + std::to_string(size) + " out of range");
  }
  if (c[0] != 0.0 || c[size - 1] != 1.0) {
    throw contract_error("validate_grid: grid must span [0,1]");
  }
  for (int j = 0; j + 1 < size; ++j) {
    if (!(c[j] < c[j + 1])) {
      throw contract_error("validate_grid: grid not strictly increasing at index " +
                           std::to_string(j));
    }
  }
}

int locate_segment(const double* c, int size, double u) {
  if (!(u > 0.0 && u <= 1.0)) {
    throw contract_error("locate_segment: u outside (0,1]");
  }
  // First grid point >= u; u belongs to the segment just below it, so a draw equal
  // to a critical value lands in the lower segment.
  const double* it = std::lower_bound(c + 1, c + size, u);
  if (it == c + size) throw contract_error("locate_segment: u above the last grid point");
  return static_cast<int>(it - c) - 1;
}

} // namespace giicov
