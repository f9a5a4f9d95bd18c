#pragma once

#include <stdexcept>
#include <string>

namespace radarmon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Tensor or input geometry does not match what a model expects.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// File missing, unreadable, truncated or malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace radarmon
