#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oscdecon {

enum class ErrorCode {
  InvalidArgument,
  NyquistViolation,
  NonConvergence,
  NoPeak,
  Overdamped,
  NonUniformSampling,
  ParseError,
  EmptyInput,
  DtMismatch,
  Unstable,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Base of every error thrown by the library. `code()` is stable and is what
/// the CLI and HTTP layers report alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::size_t iterations, double residual)
      : Error(ErrorCode::NonConvergence, what), iterations_(iterations), residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

class NonUniformSampling : public Error {
 public:
  NonUniformSampling(const std::string& what, std::size_t worst_index)
      : Error(ErrorCode::NonUniformSampling, what), worst_index_(worst_index) {}

  std::size_t worst_index() const noexcept { return worst_index_; }

 private:
  std::size_t worst_index_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline void require(bool cond, const std::string& what,
                    ErrorCode code = ErrorCode::InvalidArgument) {
  if (!cond) throw Error(code, what);
}

}  // namespace oscdecon
