#pragma once

#include <stdexcept>
#include <string>

namespace prodhyp {

// Precondition or cross-object mismatch (wrong group instance, bad config
// reference, section not normalized, ...). CLI exit code 2.
struct StructuralError : std::runtime_error {
  explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

// A declared contract failed at runtime (non-lineal space handed to a lineal
// operation, singular Theta, ...). CLI exit code 2.
struct ContractError : std::runtime_error {
  explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// Search or enumeration budget exhausted. Carries how far we got.
// CLI exit code 3.
struct BudgetError : std::runtime_error {
  int reached_radius;
  BudgetError(const std::string& msg, int reached)
      : std::runtime_error(msg), reached_radius(reached) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace prodhyp
