#pragma once

#include <stdexcept>
#include <string>

namespace hbound {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A DiscretePair violates its invariants (sizes, signs, normalization).
struct InvalidPair : Error {
  using Error::Error;
};

/// A MomentSpec has non-finite fields or a negative standard deviation.
struct InvalidSpec : Error {
  using Error::Error;
};

/// A continuous law has invalid parameters (e.g. non-positive scale).
struct InvalidLaw : Error {
  using Error::Error;
};

/// Generic invalid argument to an operation (masses out of range, bad j, ...).
struct InvalidParameters : Error {
  using Error::Error;
};

/// The spec has equal means; the requested construction needs distinct ones.
struct EqualMeans : Error {
  using Error::Error;
};

/// Both standard deviations vanish where a non-degenerate law is required.
struct DegenerateSpec : Error {
  using Error::Error;
};

/// The attainer sits on the boundary r in {0,1}; beta factors are undefined.
struct BoundaryAttainer : Error {
  using Error::Error;
};

/// Truncation interval leaves more than the tolerated tail mass outside.
struct InsufficientCoverage : Error {
  using Error::Error;
};

/// No feasible discrete pair was found on any sampled support.
struct InfeasibleSupport : Error {
  using Error::Error;
};

}  // namespace hbound
