#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rankest {

enum class ErrorCode {
  kInvalidArgument,
  kRankOutOfRange,
  kEmptySet,
  kInvalidObservation,
  kInvalidSampleSize,
  kMismatchedConfig,
  kSizeMismatch,
  kDegenerateLikelihood,
  kSingularSystem,
  kInvalidSubsetSize,
  kDegeneratePool,
  kMemoryGuard,
  kIo,
  kParse,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rankest
