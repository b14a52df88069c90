#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace lfgw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument, shape mismatch, or usage contract violation. CLI exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed or missing input file. CLI exit code 2.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid file with inconsistent content (bad indices, empty graphs).
class CorruptionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Numerical breakdown (Sinkhorn underflow, non-finite intermediates). CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lfgw
