#pragma once

#include <stdexcept>
#include <string>

namespace routesim {

enum class ErrorCode {
  parse,
  validation,
  duplicate_id,
  unreachable,
  not_found,
  invalid_argument,
  invalid_state,
  io,
  config,
};

const char* to_string(ErrorCode code) noexcept;

// All failures raised by the core carry a category so the C API can map them
// onto status codes without string matching.
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

}  // namespace routesim
