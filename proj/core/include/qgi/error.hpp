#pragma once

#include <stdexcept>
#include <string>

namespace qgi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A thin-lens relation has no finite positive solution.
class UnsolvableError : public Error {
 public:
  using Error::Error;
};

/// Geometry violates the imaging condition it is used under.
class InconsistentGeometryError : public Error {
 public:
  using Error::Error;
};

/// Grid too coarse for the field being sampled.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Quadrature result changed too much under refinement.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Request outside the supported scale or model.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Resolvability could not be decided from the sampled image.
class DetectionError : public Error {
 public:
  using Error::Error;
};

/// Separation scan failed to bracket the resolution boundary.
class ScanError : public Error {
 public:
  using Error::Error;
};

}  // namespace qgi
