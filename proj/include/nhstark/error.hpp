#pragma once

#include <stdexcept>
#include <string>

namespace nhstark {

enum class ErrorCode {
  InvalidArgument = 1,
  DecoupledChain = 2,
  GammaPole = 3,
  BranchMismatch = 4,
  NumericalFailure = 5,
  RankCollapse = 6,
  Config = 7,
  Io = 8,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a code so the C layer can map it
// onto a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nhstark
