#pragma once

#include <stdexcept>
#include <string>

namespace covkit {

enum class ErrorCode {
  DimensionMismatch,
  AsymmetryTooLarge,
  NotPositiveSemidefinite,
  PairingFailure,
  UnknownMode,
  EmptyOrFullSet,
  UnphysicalState,
  WrongModeCount,
  InvalidBipartition,
  OptimizerDiverged,
  IndexOutOfRange,
  SymplecticityLost,
  UnstableSystem,
  DegenerateResonance,
  NonPositiveInput,
  SameMode,
  SegmentCountMismatch,
  FitNotConverged,
  InsufficientBiasRange,
  MissingEntry,
  ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace covkit
