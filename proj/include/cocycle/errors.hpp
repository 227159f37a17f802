#pragma once

#include <stdexcept>
#include <string>

namespace cocycle {

// Argument outside the mathematical domain of an operation (s <= 0, j > d, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input data: non-finite entries, ragged arrays, inconsistent shapes.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A decomposition failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A certified inequality was violated; this signals a numerical bug.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cocycle
