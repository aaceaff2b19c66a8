#pragma once

#include <stdexcept>
#include <string>

namespace fpp {

// Bad user-supplied configuration or parameters. Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arguments outside the mathematical domain of an operation (vertex not in
// box, probabilities not summing to one, ...). Also exit code 2 at the CLI.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A run finished but failed a statistical validity requirement (for example
// the boundary-touch fraction exceeded its threshold). CLI exit code 3.
struct ValidityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Enumeration or table size would exceed a configured cap.
struct CapError : DomainError {
  using DomainError::DomainError;
};

// No admissible path under the given constraints.
struct InfeasibleError : DomainError {
  using DomainError::DomainError;
};

// Coupling-from-the-past exceeded its horizon cap without coalescing.
struct CoalescenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fpp
