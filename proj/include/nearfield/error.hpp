#pragma once

#include <stdexcept>
#include <string>

namespace nf {

enum class ErrorCode {
  InvalidArgument = 1,
  ConstructionFailure = 2,
  LayoutCorrupt = 3,
  UndefinedMetric = 4,
  InsufficientData = 5,
  Io = 6,
};

// Single exception type for the core library; the C API maps `code()` onto
// its status enum.
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

}  // namespace nf
