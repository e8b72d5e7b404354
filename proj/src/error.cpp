#include "error.hpp"

namespace routesim {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse: return "parse error";
    case ErrorCode::validation: return "validation error";
    case ErrorCode::duplicate_id: return "duplicate id";
    case ErrorCode::unreachable: return "unreachable";
    case ErrorCode::not_found: return "not found";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::invalid_state: return "invalid state";
    case ErrorCode::io: return "I/O error";
    case ErrorCode::config: return "configuration error";
  }
  return "error";
}

}  // namespace routesim
