#pragma once

#include <stdexcept>
#include <string>

namespace framepick {

enum class ErrorKind {
  Validation,  // inputs violate a documented invariant
  Parse,       // malformed text or binary input
  Degenerate,  // numerically degenerate input (rank deficiency, all-zero)
  Config,      // bad configuration or command-line usage
  Adapter,     // model adapter could not be spawned or died
  Protocol,    // adapter spoke something other than the wire protocol
  Io,          // filesystem or subprocess failure
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for everything thrown by the library. The kind drives the
/// CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::Validation, message) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message)
      : Error(ErrorKind::Parse, message) {}
};

class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& message)
      : Error(ErrorKind::Degenerate, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::Config, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorKind::Io, message) {}
};

// Exit codes shared by every CLI command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitAdapter = 2;
inline constexpr int kExitIo = 3;

int exit_code_for(ErrorKind kind) noexcept;

}  // namespace framepick
