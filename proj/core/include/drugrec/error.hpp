#pragma once

#include <stdexcept>
#include <string>

namespace drugrec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates an operation's precondition (bad range, dimension mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (TSV header, JSON model, embedding file).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace drugrec
