#pragma once

#include <stdexcept>
#include <string>

namespace gwl {

/// User-facing failure: bad input file, inconsistent shapes or flags.
/// The CLI reports these as a one-line diagnostic.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when solver invariant checking is enabled and an invariant breaks.
class InvariantViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace gwl
