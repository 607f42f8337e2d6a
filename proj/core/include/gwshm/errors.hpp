#pragma once

#include <stdexcept>
#include <string>

namespace gwshm {

/// Bad input: parameters, preconditions, malformed files.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Inputs were well-formed but the computation cannot proceed
/// (zero denominators, degenerate variances, solver failure).
class ComputationError : public std::runtime_error {
 public:
  explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

/// File system failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gwshm
