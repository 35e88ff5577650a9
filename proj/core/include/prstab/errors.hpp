#pragma once

#include <stdexcept>
#include <string>

namespace prstab {

/// Violated operation precondition (wrong field, out-of-range size, bad option).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operands disagree in dimension or field.
class MismatchError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Iterative eigensolver hit its sweep cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Least-squares step could not be solved (rank-deficient measurement matrix).
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace prstab
