#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace renderloc {

enum class ErrorCode {
  kBehindCamera,
  kParseError,
  kEmptyMatches,
  kDegenerateConfiguration,
  kTooFewCorrespondences,
  kNoModelFound,
  kDivergedBehindCamera,
  kSingularInformation,
  kSubsetTooSmall,
  kEmptyInput,
  kLengthMismatch,
  kOptimizerFailure,
  kInvalidArgument,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  // Parse errors carry the 1-based line number of the offending input line.
  Error(ErrorCode code, std::size_t line, const std::string& what);

  ErrorCode code() const { return code_; }
  std::size_t line() const { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_ = 0;
};

}  // namespace renderloc
