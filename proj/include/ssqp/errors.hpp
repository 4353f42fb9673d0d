#pragma once

#include <stdexcept>
#include <string>

namespace ssqp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input whose content is unusable (e.g. non-binary labels).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel could not meet its tolerance.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssqp
