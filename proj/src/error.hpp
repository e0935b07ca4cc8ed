#pragma once

#include <stdexcept>
#include <string>

namespace macroscope {

enum class ErrorCode {
  InvalidArgument,
  CoveringViolation,
  Mismatch,
  CeilingExceeded,
  Overflow,
  ProtocolFailure,
  Parse,
};

// Every failure raised by the core carries a code so the C boundary can map
// it onto a stable status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace macroscope
