#pragma once

#include <stdexcept>
#include <string>

namespace dmn {

/// Failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind { Precondition, Config, Numeric, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace dmn
