#pragma once

#include <stdexcept>
#include <string>

namespace voxmat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad parameter values, degenerate volumes, indices out of bounds.
struct InvalidArgument : Error {
  using Error::Error;
};

// Grids that must share dims/spacing but do not.
struct ShapeMismatch : Error {
  using Error::Error;
};

// Mask sets violating overlap <= union.
struct InconsistentMasks : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Payload length disagrees with the header.
struct CorruptFile : IoError {
  using IoError::IoError;
};

// Unknown dtype/kind or dtype not allowed for the kind.
struct UnsupportedFormat : IoError {
  using IoError::IoError;
};

// Malformed JSON sidecar.
struct ParseError : IoError {
  using IoError::IoError;
};

// Payload values outside the contract of their kind (alpha not in [0,1],
// mask not in {0,1}, trimap not in {0,1,2}).
struct OutOfRangeValue : Error {
  using Error::Error;
};

struct SingularSystem : Error {
  using Error::Error;
};

struct NumericalBreakdown : Error {
  using Error::Error;
};

}  // namespace voxmat
