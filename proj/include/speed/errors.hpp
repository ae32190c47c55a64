#pragma once

#include <stdexcept>
#include <string>

namespace speed {

/// Invalid caller input: bad dimensions, out-of-range parameters, malformed
/// configuration. Maps to CLI exit code 1.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Failure of a numerical procedure (non-convergence, overflow, loss of an
/// invariant). Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace speed
