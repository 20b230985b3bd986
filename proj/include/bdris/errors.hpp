#pragma once

#include <stdexcept>
#include <string>

namespace bdris {

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An option or parameter is outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A scalar argument is outside the function's domain (e.g. a non-positive
/// distance).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A linear system or decomposition failed despite regularization.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_shape(bool ok, const std::string &what) {
  if (!ok)
    throw DimensionError(what);
}

} // namespace detail
} // namespace bdris
