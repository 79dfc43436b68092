#pragma once

#include <stdexcept>
#include <string>

namespace colsim {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or inputs that violate an operation's preconditions.
struct ValidationError : Error {
  using Error::Error;
};

/// Malformed or out-of-domain scenario configuration. CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

/// Requested problem size exceeds the dense-simulation guard. CLI exit code 3.
struct ResourceGuardError : Error {
  using Error::Error;
};

/// A numerical validity check failed (state not bona fide, check scenario
/// mismatch, ...). CLI exit code 4.
struct PhysicalityError : Error {
  using Error::Error;
};

}  // namespace colsim
