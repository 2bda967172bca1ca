#pragma once

#include <stdexcept>
#include <string>

namespace entwit {

// Raised when an iterative numeric procedure cannot restore feasibility or
// converge; distinct from input validation so callers can map exit codes.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace entwit
