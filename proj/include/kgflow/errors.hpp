#pragma once

/// @file errors.hpp
/// @brief Exception taxonomy mapped onto the CLI exit-code contract.

#include <stdexcept>
#include <string>
#include <vector>

namespace kgflow {

/// Invalid or inconsistent scenario input.  Carries the full list of
/// violations so a user sees everything wrong with a config at once.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid configuration:";
    for (const auto& item : v) s += "\n  - " + item;
    return s;
  }
  std::vector<std::string> violations_;
};

/// Iterative solver failed to converge within its budget.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> residual_history)
      : std::runtime_error(what), residual_history_(std::move(residual_history)) {}
  const std::vector<double>& residual_history() const { return residual_history_; }

 private:
  std::vector<double> residual_history_;
};

/// Point lies outside the geometry's chart.
class DomainError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Geometry data violates its own contract (sigma not SPD, gamma <= 0).
class GeometryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation invoked outside its supported regime (e.g. the contact-angle
/// closure against a metric that is not diagonal on the boundary).
/// Explicit, never silent.
class UnsupportedRegimeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kgflow
