#pragma once

#include <stdexcept>
#include <string>

namespace pursuit {

enum class ErrorCode {
  kInvalidSpeedRatio,
  kZeroRange,
  kNonSmoothPoint,
  kNotInSimultaneousRegion,
  kOutOfModel,
  kCaptureRegion,
  kDegenerateFrame,
  kInfeasiblePartition,
  kUncoverableEvader,
  kCapExceeded,
  kNonFiniteHeading,
  kInvalidInput,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSpeedRatio: return "invalid-speed-ratio";
    case ErrorCode::kZeroRange: return "zero-range";
    case ErrorCode::kNonSmoothPoint: return "non-smooth-point";
    case ErrorCode::kNotInSimultaneousRegion: return "not-in-Rs";
    case ErrorCode::kOutOfModel: return "out-of-model";
    case ErrorCode::kCaptureRegion: return "capture-region-out-of-scope";
    case ErrorCode::kDegenerateFrame: return "degenerate-frame";
    case ErrorCode::kInfeasiblePartition: return "infeasible-partition";
    case ErrorCode::kUncoverableEvader: return "uncoverable-evader";
    case ErrorCode::kCapExceeded: return "cap-exceeded";
    case ErrorCode::kNonFiniteHeading: return "non-finite-heading";
    case ErrorCode::kInvalidInput: return "invalid-input";
  }
  return "unknown";
}

// Every library failure is reported through this type; `code()` is the
// machine-readable part, `what()` carries the diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pursuit
