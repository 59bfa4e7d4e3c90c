#pragma once

#include <stdexcept>
#include <string>

namespace zetasum {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition was violated by the caller.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A numerical stage could not reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class FitError : public NumericalError {
 public:
  FitError(const std::string& what, double residual, double condition)
      : NumericalError(what), residual_(residual), condition_(condition) {}
  double residual() const { return residual_; }
  double condition() const { return condition_; }

 private:
  double residual_;
  double condition_;
};

}  // namespace zetasum
