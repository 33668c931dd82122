#pragma once

#include <stdexcept>
#include <string>

namespace mpstomo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong lengths, invalid symbols, inconsistent options.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A brute-force or dense path was asked to exceed its size guard.
class GuardError : public Error {
 public:
  using Error::Error;
};

/// Numerically broken input or result (negative probabilities, zero norms).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// The K matrix acts on directions the Fisher pseudo-inverse discarded.
class GaugeMismatchError : public IntegrityError {
 public:
  using IntegrityError::IntegrityError;
};

/// Every optimizer restart diverged.
class OptimizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace mpstomo
