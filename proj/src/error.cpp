#include "pospres/error.hpp"

namespace pospres {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kTruncation: return "truncation insufficient";
    case ErrorCode::kNotInAlgebra: return "not in the degree-preserving algebra";
    case ErrorCode::kNotInvertible: return "not invertible";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kNoSignChange: return "no sign change";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kSingular: return "singular system";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

}  // namespace pospres
