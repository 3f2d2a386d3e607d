// SPDX-License-Identifier: Apache-2.0
#include "error.hpp"

namespace geotomo {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Format: return "format error";
    case ErrorCode::Positivity: return "positivity violated";
    case ErrorCode::NonFinite: return "non-finite value";
    case ErrorCode::MaxSteps: return "integrator step limit exceeded";
    case ErrorCode::OutOfDisk: return "offset outside the unit disk";
    case ErrorCode::DegenerateScale: return "degenerate scale";
    case ErrorCode::NoValidTrace: return "no valid trace";
    case ErrorCode::TooManyInvalidRays: return "too many invalid rays";
  }
  return "unknown error";
}

}  // namespace geotomo
