#pragma once

#include <stdexcept>
#include <string>

namespace isostab {

/// Failure categories; each maps to a CLI exit code.
enum class ErrorKind {
  precondition,  // violated hypothesis or input invariant (exit 2)
  capability,    // unsupported configuration (exit 2)
  convergence,   // solver did not converge (exit 3)
  schema,        // malformed input (exit 1)
  io,            // file system (exit 1)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail), kind_(kind), invariant_(std::move(invariant)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Name of the violated invariant or hypothesis.
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  ErrorKind kind_;
  std::string invariant_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string invariant, const std::string& detail) {
  throw Error(kind, std::move(invariant), detail);
}

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::precondition:
    case ErrorKind::capability:
      return 2;
    case ErrorKind::convergence:
      return 3;
    case ErrorKind::schema:
    case ErrorKind::io:
      return 1;
  }
  return 1;
}

}  // namespace isostab
