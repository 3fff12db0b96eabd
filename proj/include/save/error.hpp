#pragma once

#include <stdexcept>
#include <string>

namespace save {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range data (vectors, trace files).
class InputError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Permutation-space or exact-solver caps.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

// Scenario / manifest problems.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace save
