#pragma once

#include <stdexcept>
#include <string>

namespace gapesd {

/// Input parameters that violate a documented constraint.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A formula evaluated outside its domain (negative radicand, |c1| > 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive integration gave up: the step size underflowed or the step budget ran out.
class StiffnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown preset name.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Density matrix passed to a routine that only handles X-shaped states.
class UnsupportedShape : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace gapesd
