#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dcfguard {

/// Argument outside the mathematical domain of an analytic function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A fixed-point solver failed to reach its residual tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what + " (iterations=" + std::to_string(iterations) +
                           ", residual=" + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// The fair-rate estimate for a window is unavailable.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid scenario configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dcfguard
