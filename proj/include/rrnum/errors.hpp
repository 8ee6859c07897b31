#pragma once

#include <stdexcept>
#include <string>

namespace rrnum {

// Argument outside the mathematical domain of an operation (negative code
// rate, log of a zero rate, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent network description: dangling link index, missing code rate
// on a route, malformed price vector.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-finite values produced while solving a subproblem.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Instance or configuration rejected by validation (schema, lemma checks).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rrnum
