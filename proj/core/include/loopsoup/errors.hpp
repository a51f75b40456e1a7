#pragma once

#include <stdexcept>
#include <string>

namespace loopsoup {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition (negative weight, bad node set,
// disconnected graph, recurrent model, malformed file, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A factorization met a zero or nonpositive pivot.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

// An enumeration or exact computation would exceed its size guard.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace loopsoup
