#pragma once

#include <stdexcept>
#include <string>

namespace dukf {

// Input, configuration or contract problems. The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical blow-up, truncation breaches, unusable estimates. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContractViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigurationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnsupportedModelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MalformedOperatorError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IncompatibleTableError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TableLoadError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class BlowUpError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OrderOverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnusableEstimateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dukf
