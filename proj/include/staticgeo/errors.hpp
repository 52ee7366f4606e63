#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace staticgeo {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed expression source. Carries the byte offset of the offending token.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

// Unbound variable or out-of-domain function argument during evaluation.
class EvalError : public Error {
public:
  using Error::Error;
};

// Metric not positive definite (or numerically indistinguishable from singular).
class SingularMetricError : public Error {
public:
  using Error::Error;
};

// Bad arguments to a constructor, operation, or CLI/config entry.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

// Quadrature or fitting did not converge to the requested tolerance.
class NumericsError : public Error {
public:
  using Error::Error;
};

}  // namespace staticgeo
