#pragma once

#include <stdexcept>
#include <string>

namespace mslab {

// Status codes shared with the C API (see include/mslab/mslab.h).
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDegenerate = 2,
  kNotConverged = 3,
  kTooLarge = 4,
  kNotInvertible = 5,
  kIo = 6,
  kParse = 7,
  kBrokenInvariant = 8,
  kInternal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, const std::string& message,
                    ErrorCode code = ErrorCode::kInvalidArgument) {
  if (!condition) throw Error(code, message);
}

}  // namespace mslab
