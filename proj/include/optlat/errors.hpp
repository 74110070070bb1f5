#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace optlat {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, std::size_t iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

class PicardNoConvergence : public NoConvergence {
 public:
  using NoConvergence::NoConvergence;
};

class ZeroPivot : public Error {
 public:
  ZeroPivot(const std::string& what, std::size_t row) : Error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// Raised when a linear solve inside a time step fails.
class LinearSolveFailure : public Error {
 public:
  using Error::Error;
};

// Raised when a step result breaches the maximum-principle bounds.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Wraps a stepper failure with the step index and time at which it occurred.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, long step, double time)
      : Error(what), step_(step), time_(time) {}

  long step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  long step_;
  double time_;
};

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace optlat
