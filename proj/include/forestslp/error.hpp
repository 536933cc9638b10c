#pragma once

#include <stdexcept>
#include <string>

namespace forestslp {

enum class ErrorKind {
  kSyntax,
  kUnknownLabel,
  kInvalidForest,
  kCycle,
  kUndefinedOperation,
  kUndefinedVariable,
  kNotNormalForm,
  kExplosionGuard,
  kNotATree,
  kTreeTooSmall,
  kNotAnFcnsImage,
  kRankViolation,
  kRootLabelMismatch,
  kBottomLabelMismatch,
  kInvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown by parsers; offset is a byte offset (or line number for grammar files).
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message)
      : Error(ErrorKind::kSyntax, "syntax error at " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace forestslp
