#pragma once

#include <stdexcept>
#include <string>

namespace kdvb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sizes or grids of two operands do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain where the operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Coefficients flagged as a real field are not Hermitian-symmetric.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a norm above the configured ceiling during a time march.
class BlowUpError : public Error {
 public:
  BlowUpError(double time, const std::string& what);
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Picard iteration failed to contract within the iteration budget.
class NonContractionError : public Error {
 public:
  NonContractionError(double last_ratio, const std::string& what);
  double last_ratio() const noexcept { return last_ratio_; }

 private:
  double last_ratio_;
};

/// Newton iteration stagnated.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(double last_residual, const std::string& what);
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Singular Newton Jacobian (expected exactly at the bifurcation point).
class BifurcationPointError : public Error {
 public:
  using Error::Error;
};

/// Requested truncation exceeds the resolution of the stored coefficients.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver or other dense linear algebra failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An eigenpair fails the residual check when the operator is re-applied.
class InconsistentEigenpairError : public Error {
 public:
  InconsistentEigenpairError(double residual, const std::string& what);
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Malformed configuration or input file; the message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kdvb
