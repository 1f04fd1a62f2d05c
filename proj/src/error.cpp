#include "nhstark/error.hpp"

namespace nhstark {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DecoupledChain: return "decoupled chain";
    case ErrorCode::GammaPole: return "Gamma-function pole";
    case ErrorCode::BranchMismatch: return "branch mismatch";
    case ErrorCode::NumericalFailure: return "numerical failure";
    case ErrorCode::RankCollapse: return "rank collapse";
    case ErrorCode::Config: return "configuration error";
    case ErrorCode::Io: return "I/O error";
  }
  return "unknown error";
}

}  // namespace nhstark
