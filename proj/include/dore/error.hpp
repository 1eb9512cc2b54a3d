#pragma once

#include <stdexcept>
#include <string>

namespace dore {

enum class ErrorCode {
  invalid_argument = 1,
  parse_error = 2,
  io_error = 3,
  backend_error = 4,
  unsupported = 5,
  internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace dore
