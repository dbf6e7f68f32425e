#pragma once

#include <stdexcept>
#include <string>

namespace opgrowth {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  zero_norm,
  boundary_leak,
  pole,
  loss_of_positivity,
  insufficient_statistics,
  window_too_small,
  cutoff_insufficient,
  eigensolver_failure,
  empty_sector,
  invalid_config,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception thrown by every opgrowth operation; carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace opgrowth
