#pragma once

#include <stdexcept>
#include <string>

namespace kge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent dataset / rule / grounding input.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value or unknown key. Maps to CLI exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace kge
