#pragma once

// Error taxonomy for the lab. Every failure that a caller can reasonably
// branch on gets its own type; all derive from qsl::Error so "catch anything
// domain-level" stays a one-liner. Messages carry the offending numbers
// because these exceptions end up verbatim in CLI output.

#include <stdexcept>
#include <string>

namespace qsl {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input (JSON schema violations, bad flags, unreadable files).
struct InputError : Error {
  using Error::Error;
};

// A numerical null-space / rank decision fell inside the guard band around
// the threshold, so the dimension of the answer is not trustworthy.
struct RankAmbiguity : Error {
  using Error::Error;
};

// The direct sum of eigenvalue-pair spaces failed to reproduce the singular
// space, or assembled coordinate blocks failed to reproduce the form.
struct SplittingMismatch : Error {
  using Error::Error;
};

// The imaginary part restricted to the singular space is neither definite
// nor identically zero.
struct IndefiniteButNonzero : Error {
  using Error::Error;
};

struct NotPartiallyElliptic : Error {
  using Error::Error;
};

// An operation that only makes sense for partially elliptic forms was asked
// to run on a form whose restriction to the singular space vanishes.
struct EllipticityRequired : Error {
  using Error::Error;
};

// Eigenvalue clusters of the Hamilton map overlap at the clustering scale,
// so multiplicities cannot be assigned.
struct ClusterAmbiguity : Error {
  using Error::Error;
};

struct NotSymplectic : Error {
  using Error::Error;
};

struct QuadratureNoConvergence : Error {
  using Error::Error;
};

struct NotCharacteristic : Error {
  using Error::Error;
};

struct NotCritical : Error {
  using Error::Error;
};

struct OdeStepFailure : Error {
  using Error::Error;
};

struct BasisCap : Error {
  using Error::Error;
};

// A certified lower bound degenerated on the whole scan set.
struct FitFailure : Error {
  using Error::Error;
};

}  // namespace qsl
