#pragma once

#include <stdexcept>
#include <string>

namespace gascap {

// Malformed input: bad instance, index out of range, incompatible widths.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A size or budget guard tripped (enumeration cap, statevector cap, ...).
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gascap
