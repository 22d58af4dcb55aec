#pragma once

#include <stdexcept>
#include <string>

namespace vinecop {

enum class ErrorCode {
  InvalidArgument = 1,
  Domain,
  Io,
  Parse,
  Schema,
  NonFinite,
  UndefinedResult,
  Config,
};

/// Base exception for every failure raised by the library. The code is what
/// crosses the C boundary; the message carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::Parse, what) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(ErrorCode::Schema, what) {}
};

}  // namespace vinecop
