#pragma once

#include <stdexcept>
#include <string>

namespace nvmix {

/// Argument outside the mathematical domain of the operation (poles included).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative kernel exhausted its budget, or its result left the double range.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: grids, flags, custom laws.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace nvmix
