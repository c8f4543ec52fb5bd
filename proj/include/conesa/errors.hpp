#pragma once

#include <stdexcept>
#include <string>

namespace conesa {

/// Thrown when a caller violates an operation's preconditions
/// (dimension mismatch, out-of-range strategy parameters, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a state is outside the domain of the closed-form theory,
/// e.g. r = 0 where the normalized mutation strength is undefined.
class DegenerateState : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace conesa
