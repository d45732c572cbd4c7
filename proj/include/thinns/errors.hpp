/// @file errors.hpp
/// @brief Error taxonomy mapped onto CLI exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace thinns {

/// Invalid configuration, precondition violation or inadmissible argument
/// (exit code 2 at the CLI).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure: iteration divergence, non-convergence within budget
/// (exit code 3 at the CLI).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The discrete solution left the admissible class: density at or below the
/// positivity floor, or non-finite values. Carries the failure time.
struct BlowupError : NumericalError {
  double t;
  BlowupError(double t_, const std::string& msg) : NumericalError(msg), t(t_) {}
};

}  // namespace thinns
