#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace neckmcl {

enum class ErrorCode {
  InvalidInput,
  Shape,
  State,
  DegenerateChannel,
  DegenerateSession,
  DegenerateRange,
  DegenerateVariance,
  CalibrationFailure,
  Io,
  Parse,
  Config,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Process exit status used by the CLI for each error category.
int exit_status(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace neckmcl
