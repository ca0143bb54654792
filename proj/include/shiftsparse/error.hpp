#pragma once

#include <stdexcept>
#include <string>

namespace shiftsparse {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand sizes disagree (signal length vs dictionary rows, etc.).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A parameter is outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Phi * Phi^T is singular or too badly conditioned to factor.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// A non-finite objective or gradient appeared during descent.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A request would exceed a hard resource guard.
class ResourceError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

inline void require_dims(bool condition, const std::string& message) {
  if (!condition) throw DimensionError(message);
}

}  // namespace detail
}  // namespace shiftsparse
