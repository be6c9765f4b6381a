#pragma once

#include <stdexcept>
#include <string>

namespace pospres {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch,
  kOutOfRange,
  kTruncation,
  kNotInAlgebra,
  kNotInvertible,
  kUnsupported,
  kNoSignChange,
  kParse,
  kSingular,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pospres
