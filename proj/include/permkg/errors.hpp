#pragma once

#include <stdexcept>
#include <string>

namespace permkg {

// Base for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed scenario/config input. line == 0 means the position is unknown
// (structural problem rather than a lexical one).
struct ParseError : Error {
  int line;
  ParseError(int line_, const std::string& reason)
      : Error("parse error at line " + std::to_string(line_) + ": " + reason), line(line_) {}
};

struct UnknownEntityKindError : Error {
  explicit UnknownEntityKindError(const std::string& kind)
      : Error("unknown entity kind: " + kind) {}
};

struct DuplicateIdError : Error {
  explicit DuplicateIdError(const std::string& id) : Error("duplicate entity id: " + id) {}
};

struct DanglingReferenceError : Error {
  explicit DanglingReferenceError(const std::string& id)
      : Error("reference to undeclared entity: " + id) {}
};

struct SignatureViolationError : Error {
  explicit SignatureViolationError(const std::string& what) : Error("bad relation: " + what) {}
};

struct StartNotHeldError : Error {
  StartNotHeldError() : Error("start permission is not in the initial set") {}
};

struct ActionOutOfRangeError : Error {
  ActionOutOfRangeError() : Error("action index out of range") {}
};

struct EmptyActionMaskError : Error {
  EmptyActionMaskError() : Error("action mask has no valid entries") {}
};

struct NonFiniteGradientError : Error {
  NonFiniteGradientError() : Error("non-finite gradient encountered") {}
};

struct EmptySeedsError : Error {
  EmptySeedsError() : Error("random walk needs a non-empty seed set") {}
};

struct NonConvergenceError : Error {
  explicit NonConvergenceError(int iters)
      : Error("iteration did not converge within " + std::to_string(iters) + " steps") {}
};

struct EmptyTriplesError : Error {
  EmptyTriplesError() : Error("no triples to train on") {}
};

struct InitialNotSubsetOfTruthError : Error {
  InitialNotSubsetOfTruthError() : Error("initial set is not a subset of the truth set") {}
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace permkg
