#include "neckmcl/error.hpp"

namespace neckmcl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid_input";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::State: return "state";
    case ErrorCode::DegenerateChannel: return "degenerate_channel";
    case ErrorCode::DegenerateSession: return "degenerate_session";
    case ErrorCode::DegenerateRange: return "degenerate_range";
    case ErrorCode::DegenerateVariance: return "degenerate_variance";
    case ErrorCode::CalibrationFailure: return "calibration_failure";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Config: return "config";
  }
  return "unknown";
}

int exit_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return 2;
    case ErrorCode::Shape: return 3;
    case ErrorCode::State: return 4;
    case ErrorCode::DegenerateChannel: return 5;
    case ErrorCode::DegenerateSession: return 6;
    case ErrorCode::DegenerateRange: return 7;
    case ErrorCode::DegenerateVariance: return 8;
    case ErrorCode::CalibrationFailure: return 9;
    case ErrorCode::Io: return 10;
    case ErrorCode::Parse: return 11;
    case ErrorCode::Config: return 12;
  }
  return 1;
}

}  // namespace neckmcl
