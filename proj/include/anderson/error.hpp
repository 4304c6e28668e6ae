#pragma once

#include <stdexcept>
#include <string>

namespace anderson {

// Bad input to a mathematical operation (site outside cube, invalid index, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solver failure, quadrature non-convergence, spectral collision.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double achieved = 0.0)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// A checked inequality that should hold did not. Reportable, not a crash.
class FindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace anderson
