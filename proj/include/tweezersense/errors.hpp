#pragma once

#include <stdexcept>
#include <string>

namespace tweezersense {

/// Two operands live on different sampling lattices.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the domain where the operation is defined
/// (wrong plane tag, displacement beyond the sweep bound, grid too small).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input carries no usable content, e.g. a zero-norm field or a vanishing
/// derivative mode.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical parameters or a run configuration violate their invariants.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tweezersense
