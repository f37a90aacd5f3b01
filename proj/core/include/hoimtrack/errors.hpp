#pragma once

#include <stdexcept>
#include <string>

namespace hoimtrack {

/// Caller supplied arguments that violate an operation's preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation reached a state it cannot continue from (zero-norm vector,
/// singular matrix).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Embedding of a vector whose linear image is exactly zero.
class DegenerateInputError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hoimtrack
