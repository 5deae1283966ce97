#pragma once

#include <stdexcept>
#include <string>

namespace epsilon0 {

/// Input violates a documented precondition or schema (CLI exit code 2).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration or size cap would be exceeded (CLI exit code 3).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical identity that must hold by construction failed.
class MathCheckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace epsilon0
