#pragma once

#include <stdexcept>
#include <string>

namespace medgrad {

/// Invalid input: bad parameters, malformed files, violated preconditions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An interpolation or evaluation left the masked domain.
class OutsideDomainError : public ValidationError {
 public:
  OutsideDomainError() : ValidationError("sample outside domain") {}
  explicit OutsideDomainError(const std::string& what) : ValidationError(what) {}
};

/// An iterative method stopped at its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal invariant (a bug, not bad input).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace medgrad
