// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace spdcstat {

enum class ErrorCode {
  Domain,          // parameter outside its mathematical domain
  Range,           // argument outside a supported range (caps, contract limits)
  NegativeSignal,  // raw rate below the dark-count rate
  Parse,           // malformed config or CSV text
  Validation,      // well-formed input violating a value constraint
  Io,              // file could not be opened, read or written
  Input,           // dataset unusable for the requested operation
  DegenerateFit,   // objective carries no information about the parameter
  Numeric,         // non-finite intermediate or failed convergence
};

const char* to_string(ErrorCode code) noexcept;

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

}  // namespace spdcstat
