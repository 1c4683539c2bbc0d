#pragma once

#include <stdexcept>
#include <string>

namespace neurodsp {

// Mirrors nd_status in neurodsp.h; keep the numeric values in sync.
enum class ErrorCode : int {
  InvalidArgument = 1,
  FormatMismatch = 2,
  OutOfRange = 3,
  DimensionMismatch = 4,
  WrongMode = 5,
  Io = 6,
  Parse = 7,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace neurodsp
