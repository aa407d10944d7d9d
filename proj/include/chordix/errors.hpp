#pragma once

#include <stdexcept>
#include <string>

namespace chordix {

/// Base class for all recoverable errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class DuplicateIdError : public Error {
 public:
  using Error::Error;
};

/// Two bodies touch within tolerance; boundary-coincident configurations
/// are rejected because chord bookkeeping is ill-defined there.
class SharedBoundaryError : public Error {
 public:
  using Error::Error;
};

class EmptyBodyError : public Error {
 public:
  using Error::Error;
};

class RejectionOverflowError : public Error {
 public:
  using Error::Error;
};

class OverlappingSceneError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOverlapChainError : public Error {
 public:
  using Error::Error;
};

class BinningMismatchError : public Error {
 public:
  using Error::Error;
};

class NegativeValueError : public Error {
 public:
  using Error::Error;
};

/// Diagonal transfer with a kernel that does not vanish at zero distance.
class SingularDiagonalError : public Error {
 public:
  using Error::Error;
};

class ZeroMassError : public Error {
 public:
  using Error::Error;
};

/// Raised by analytic routes when the scene is outside their closed-form
/// domain (only spheres are supported there).
class UnsupportedGeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace chordix
