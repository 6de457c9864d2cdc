#pragma once

// Exception taxonomy for the library and the command-line front end.
//
//   ValidationError      bad user input (config values, CLI arguments) -> exit 2
//   NumericalError       a computation left its domain of validity     -> exit 3
//   FitFailure           an estimator failed to converge               -> exit 3
//   UnresolvablePosition the localization problem is degenerate        -> exit 3

#include <stdexcept>
#include <string>

namespace trumpet {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnresolvablePosition : public FitFailure {
 public:
  using FitFailure::FitFailure;
};

// Throws ValidationError with a "name=value" style message when `ok` is false.
inline void require_valid(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace trumpet
