#pragma once

#include <stdexcept>
#include <string>

namespace kgfock {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// A documented precondition on an argument (Hermiticity, antisymmetry, ...) was violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double lambda_quant)
      : Error(what), lambda_quant_(lambda_quant) {}
  double lambda_quant() const noexcept { return lambda_quant_; }

 private:
  double lambda_quant_;
};

class UnstableConfigurationError : public Error {
 public:
  UnstableConfigurationError(const std::string& what, double delta)
      : Error(what), delta_(delta) {}
  double delta() const noexcept { return delta_; }

 private:
  double delta_;
};

class IllConditionedError : public Error {
 public:
  IllConditionedError(const std::string& what, double singular_value)
      : Error(what), singular_value_(singular_value) {}
  double singular_value() const noexcept { return singular_value_; }

 private:
  double singular_value_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace kgfock
