#pragma once

#include <stdexcept>
#include <string>

namespace viscoflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NonPositiveDeterminant : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class SingularTensor : public Error {
 public:
  using Error::Error;
};

class NotUnimodular : public Error {
 public:
  using Error::Error;
};

class DegenerateDrivingForce : public Error {
 public:
  using Error::Error;
};

/// Raised by the step solver; `step` is filled in by the driving loop.
class NoConvergence : public Error {
 public:
  NoConvergence(int iterations, double residual, long step = -1);

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }
  long step() const noexcept { return step_; }

 private:
  int iterations_;
  double residual_;
  long step_;
};

class ZeroDeviator : public Error {
 public:
  using Error::Error;
};

class InfeasibleTheta : public Error {
 public:
  using Error::Error;
};

class EmptyWindow : public Error {
 public:
  using Error::Error;
};

class NonPositiveDistance : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace viscoflow
