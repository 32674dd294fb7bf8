#pragma once

#include <stdexcept>
#include <string>

namespace dirup {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two operands live on lattices of different dimension.
class DimensionMismatch : public InvalidArgument {
 public:
  DimensionMismatch(int expected, int actual)
      : InvalidArgument("dimension mismatch: expected " + std::to_string(expected) +
                        ", got " + std::to_string(actual)) {}
};

/// Every polynomial over the requested support has infinite angular variance.
class InfiniteVariance : public Error {
 public:
  using Error::Error;
};

/// A lattice point was matched by none of the mask cases.
class CoverageViolation : public Error {
 public:
  using Error::Error;
};

/// The requested computation exceeds a configured size or precision budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace dirup
