// SPDX-License-Identifier: Apache-2.0
#include "spdcstat/error.hpp"

namespace spdcstat {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Domain: return "domain error";
    case ErrorCode::Range: return "range error";
    case ErrorCode::NegativeSignal: return "negative signal";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Validation: return "validation error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Input: return "input error";
    case ErrorCode::DegenerateFit: return "degenerate fit";
    case ErrorCode::Numeric: return "numeric error";
  }
  return "unknown error";
}

}  // namespace spdcstat
