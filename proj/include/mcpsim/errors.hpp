#pragma once

#include <stdexcept>
#include <string>

namespace mcpsim {

// Parameter outside the domain where a formula or model is defined.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Caller-supplied state violates an operation's precondition
// (e.g. coupled initial configurations that are not ordered).
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// A configured resource cap (event count, sites) would be exceeded.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed serialized input.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mcpsim
