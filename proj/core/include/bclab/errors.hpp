#pragma once

#include <stdexcept>
#include <string>

namespace bclab {

/// Invalid parameters or malformed configuration. The CLI maps this to
/// exit code 2, before any compute starts.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (root-finder non-convergence, orbit escaping the
/// domain). Carries the offending residual when one is available.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class IndexError : public std::out_of_range {
 public:
  explicit IndexError(const std::string& what) : std::out_of_range(what) {}
};

/// Calibration orbit too short to resolve the requested measures.
class CalibrationError : public std::runtime_error {
 public:
  explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bclab
