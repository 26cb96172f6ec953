#pragma once

#include <stdexcept>
#include <string>

namespace hfc4 {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

/// A configuration or parameter set rejected by a validation gate.
struct ValidationError : Error {
  using Error::Error;
};

/// Work or memory request above the configured budget.
struct BudgetError : Error {
  using Error::Error;
};

/// Relative mass drift exceeded the integrator's guard.
struct DriftGuardError : Error {
  using Error::Error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace hfc4
