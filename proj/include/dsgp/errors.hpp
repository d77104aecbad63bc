#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsgp {

/// Raised when an operation receives inputs that violate its preconditions.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a factorization or downdate cannot be carried out in floating point.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Removing an observation would require dividing by a (near) zero pivot.
class RemovalSingularityError : public NumericalError {
 public:
  RemovalSingularityError(const std::string& what, std::size_t index)
      : NumericalError(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace dsgp
