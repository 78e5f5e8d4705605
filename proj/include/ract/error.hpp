#pragma once

#include <stdexcept>
#include <string>

namespace ract {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside its documented range (k, K, B, q, cutoff, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a type invariant (non-finite entries, shape mismatch).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Input is valid but carries no usable information (all-zero spectrum,
/// every null column degenerate).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class SingularDesignError : public Error {
 public:
  using Error::Error;
};

/// The requested singular subspace is not unique (eigen-gap below tolerance).
class IllPosedSubspaceError : public Error {
 public:
  using Error::Error;
};

/// Ratio with a zero denominator (zero Ky-Fan signal in increments()).
class UndefinedRatioError : public Error {
 public:
  using Error::Error;
};

class InvalidConfigError : public Error {
 public:
  using Error::Error;
};

/// CSV parse failure; carries the 1-based line and column of the offending cell.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line, long column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  long line() const noexcept { return line_; }
  long column() const noexcept { return column_; }

 private:
  long line_;
  long column_;
};

}  // namespace ract
