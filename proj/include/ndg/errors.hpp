#pragma once

#include <stdexcept>
#include <string>

namespace ndg {

/// Malformed or inconsistent input (schema, references, invariants of loaded data).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver could not reach its convergence criterion.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant did not hold; indicates a bug rather than bad input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ndg
