#include "oscdecon/error.hpp"

namespace oscdecon {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NyquistViolation: return "NyquistViolation";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NoPeak: return "NoPeak";
    case ErrorCode::Overdamped: return "Overdamped";
    case ErrorCode::NonUniformSampling: return "NonUniformSampling";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DtMismatch: return "DtMismatch";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace oscdecon
