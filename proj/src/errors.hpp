#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace regfilt {

enum class ErrorCode {
  invalid_argument,
  empty_input,
  parse,
  io,
  under_determined,
  degenerate,
  invalid_scale,
  numerical,
  infeasible,
};

const char* error_code_name(ErrorCode code);

/// All library failures surface as this exception; the C API and the CLI
/// translate the code into a status / exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace regfilt
