#pragma once

#include <stdexcept>
#include <string>

namespace elasticlane {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// A spectrum handed to the inverse transform was not Hermitian.
class NonHermitianSpectrum : public Error {
 public:
  using Error::Error;
};

/// Lane with fewer than two valid rows.
class DegenerateLane : public Error {
 public:
  using Error::Error;
};

class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double step_size, int step)
      : Error(what), step_size_(step_size), step_(step) {}
  double step_size() const noexcept { return step_size_; }
  int step() const noexcept { return step_; }

 private:
  double step_size_;
  int step_;
};

}  // namespace elasticlane
