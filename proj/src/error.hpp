// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace geotomo {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Format,
  Positivity,
  NonFinite,
  MaxSteps,
  OutOfDisk,
  DegenerateScale,
  NoValidTrace,
  TooManyInvalidRays,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace geotomo
