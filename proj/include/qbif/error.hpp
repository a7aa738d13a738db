#pragma once

#include <stdexcept>
#include <string>

namespace qbif {

// Base for every error raised by the library. The CLI maps subclasses onto
// exit codes (see cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad caller input: malformed files, out-of-range parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A representation formula evaluated at its pole (x = 1/2 or y = 1/2).
class SingularityError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// PoA/PoS requested with a non-positive welfare in a denominator.
class UndefinedRatio : public Error {
 public:
  using Error::Error;
};

// The game class is outside what an analysis or mechanism covers.
class UnsupportedCase : public Error {
 public:
  using Error::Error;
};

// A mechanism cannot reach the requested state for this game.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// A quasi-static schedule sub-step did not settle within max_time.
class ScheduleStalled : public Error {
 public:
  using Error::Error;
};

// Non-finite state during integration. Signals a bug.
class IntegrationDiverged : public Error {
 public:
  using Error::Error;
};

// An internal cross-check failed (e.g. no QRE found at valid temperatures).
class InternalConsistency : public Error {
 public:
  using Error::Error;
};

// A schedule temperature below the untaxed base temperature.
class NegativeTax : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

}  // namespace qbif
