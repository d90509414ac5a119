#pragma once

#include <stdexcept>
#include <string>

namespace tuplespec {

// Error categories aligned with process exit codes: 2 config, 3 data, 4 runtime.
class Error : public std::runtime_error {
 public:
  Error(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(2, msg) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(3, msg) {}
};

class RuntimeFailure : public Error {
 public:
  explicit RuntimeFailure(const std::string& msg) : Error(4, msg) {}
};

}  // namespace tuplespec
