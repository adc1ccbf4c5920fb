#pragma once

// Exception taxonomy. Estimation failures (non-convergence, singular weighting) are
// reported through result flags, not exceptions; throwing is reserved for misuse of
// the API, bad inputs, and broken internal invariants.

#include <stdexcept>
#include <string>

namespace giicov {

// User-supplied configuration is malformed (unknown key, unparsable value, value out
// of its documented range). CLI maps this to exit code 2.
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Input data cannot be read or fails validation (missing file, malformed CSV, ragged
// panel). CLI maps this to exit code 3.
class data_error : public std::runtime_error {
public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// An internal invariant was violated. Indicates a bug in this library, not in the
// caller's inputs.
class contract_error : public std::logic_error {
public:
  explicit contract_error(const std::string& what) : std::logic_error(what) {}
};

// The change of variables hit a segment whose anchor width is below the denominator
// floor, so the transform is not defined there.
class degenerate_segment_error : public std::runtime_error {
public:
  explicit degenerate_segment_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace giicov
