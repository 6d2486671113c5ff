#pragma once

#include <stdexcept>
#include <string>

namespace quench {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed parameters: bad dimension, radius, grid size, incomplete profile.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

// u reached 1 somewhere; the source term is no longer defined.
class TouchdownError : public Error {
public:
  using Error::Error;
};

// Time integration could not make progress (repeated overshoot, singular solve).
class SolverError : public Error {
public:
  using Error::Error;
};

}  // namespace quench
