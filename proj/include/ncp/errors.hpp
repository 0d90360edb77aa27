#pragma once

#include <stdexcept>
#include <string>

namespace ncp {

// Bad input: malformed measure, violated precondition, invalid scenario.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sigma-transform or multiplicative free convolution of a measure with mean 0.
class ZeroMean : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A numerical procedure failed (non-convergence, invariant violation).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact composition would exceed the configured degree cap; callers fall
// back to pointwise grid evaluation.
class DegreeCapExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ncp
