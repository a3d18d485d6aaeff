#include "renderloc/error.h"

namespace renderloc {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyMatches: return "EmptyMatches";
    case ErrorCode::kDegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::kTooFewCorrespondences: return "TooFewCorrespondences";
    case ErrorCode::kNoModelFound: return "NoModelFound";
    case ErrorCode::kDivergedBehindCamera: return "DivergedBehindCamera";
    case ErrorCode::kSingularInformation: return "SingularInformation";
    case ErrorCode::kSubsetTooSmall: return "SubsetTooSmall";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kOptimizerFailure: return "OptimizerFailure";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
      code_(code) {}

Error::Error(ErrorCode code, std::size_t line, const std::string& what)
    : std::runtime_error(std::string(ErrorCodeName(code)) + " at line " +
                         std::to_string(line) + ": " + what),
      code_(code),
      line_(line) {}

}  // namespace renderloc
