#pragma once

#include <stdexcept>
#include <string>

namespace nowcast {

// Error taxonomy, mapped to process exit codes by the CLI:
//   ConfigError / DomainError -> 1, DataError (and subtypes) -> 2,
//   NumericError -> 3.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class ShapeError : public DataError {
 public:
  explicit ShapeError(const std::string& msg) : DataError(msg) {}
};

class IoError : public DataError {
 public:
  explicit IoError(const std::string& msg) : DataError(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nowcast
