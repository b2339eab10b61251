#include "spatraf/error.hpp"

namespace spatraf {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyPattern: return "EmptyPattern";
    case ErrorCode::EmptyAttractorSet: return "EmptyAttractorSet";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NumericalNonConvergence: return "NumericalNonConvergence";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace spatraf
