#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace herm {

// Base class for every failure raised by the library. Each subclass maps to
// one failure mode the callers (and the CLI exit codes) distinguish.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class PositivityViolation : public Error {
 public:
  PositivityViolation(std::size_t point, double eigenvalue, const std::string& what)
      : Error(what), point_(point), eigenvalue_(eigenvalue) {}
  std::size_t point() const { return point_; }
  double eigenvalue() const { return eigenvalue_; }

 private:
  std::size_t point_;
  double eigenvalue_;
};

class SingularWedgeMap : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class SignIndefinite : public Error {
 public:
  using Error::Error;
};

class IncompatibleRHS : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation (e.g. "metric is Gauduchon") does not hold.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class EigenFailure : public Error {
 public:
  EigenFailure(std::size_t point, const std::string& what) : Error(what), point_(point) {}
  std::size_t point() const { return point_; }

 private:
  std::size_t point_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace herm
