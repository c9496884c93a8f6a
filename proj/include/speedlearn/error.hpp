#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace speedlearn {

enum class ErrorCode {
  kEmptyStream,
  kNonMonotonicTime,
  kGapTooLarge,
  kNonFinite,
  kInfeasibleProfile,
  kInvalidProfile,
  kTooFewFixes,
  kNonUniformRate,
  kEmptySeries,
  kLengthMismatch,
  kNoLanes,
  kTooFewDrives,
  kInvalidConfig,
  kShapeMismatch,
  kEmptyDataset,
  kStreamTooShort,
  kIoFailure,
  kChecksumMismatch,
  kConfigMismatch,
  kMissingTruth,
  kSpanMismatch,
  kNegativeSpeed,
  kNonPositiveDt,
  kDivergence,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library is reported through this exception type; the
// code lets callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace speedlearn
