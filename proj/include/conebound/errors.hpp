#pragma once

#include <stdexcept>
#include <string>

namespace conebound {

// Malformed input: bad dataset, bad flag value, ill-posed class.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A step, memory or enumeration budget was exhausted.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The request is well-formed but outside what this build can compute (e.g. rank too large).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A broken internal invariant.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace conebound
