#pragma once

#include <stdexcept>
#include <string>

namespace condop {

// Invalid input data: bad weights, mismatched spaces, malformed partitions.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was called for the wrong exponent regime (p = q vs q < p vs p < q).
class CaseError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A documented precondition of an operation does not hold on the given instance.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Request exceeds the desk-scale limits (e.g. refinement depth cap).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the recognizers when a matrix does not factor as k E(w .).
class NotConditionalType : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace condop
