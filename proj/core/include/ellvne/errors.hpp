#pragma once

#include <stdexcept>
#include <string>

namespace ellvne {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Quantity diverges for the requested argument (e.g. K(1)).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonHermitianError : public Error {
 public:
  using Error::Error;
};

// A set of operators that must be linearly independent is not.
class LinearDependenceError : public Error {
 public:
  using Error::Error;
};

// Operators do not satisfy the commutation relations of the requested case.
class ClosureError : public Error {
 public:
  ClosureError(const std::string& relation, double residual, const std::string& what)
      : Error(what), relation_(relation), residual_(residual) {}
  const std::string& relation() const noexcept { return relation_; }
  double residual() const noexcept { return residual_; }

 private:
  std::string relation_;
  double residual_;
};

// Structure constants make a theorem formula singular (alpha + beta = 0, alpha = 0, ...).
class DegenerateConstantsError : public Error {
 public:
  using Error::Error;
};

// Coefficient system of the converse construction is inconsistent.
class DerivationError : public Error {
 public:
  DerivationError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Covariance condition of the linear-part elimination does not hold.
class GaugeError : public Error {
 public:
  GaugeError(const std::string& what, double max_defect, double worst_time)
      : Error(what), max_defect_(max_defect), worst_time_(worst_time) {}
  double max_defect() const noexcept { return max_defect_; }
  double worst_time() const noexcept { return worst_time_; }

 private:
  double max_defect_;
  double worst_time_;
};

}  // namespace ellvne
