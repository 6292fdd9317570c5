#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edrlab {

enum class ErrorCode {
  kDimMismatch,
  kNonUnitary,
  kNonHermitian,
  kUnnormalized,
  kUndefinedFunction,
  kParse,
  kConfig,
  kNumericalInconsistency,
};

/// Stable upper-case name used in CLI messages and model-file diagnostics.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace edrlab
