// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace esrsim {

enum class ErrorCode {
  shape_mismatch,
  index_out_of_range,
  size_overflow,
  not_spd,
  numerical_breakdown,
  invalid_config,
  epoch_violation,
  range_violation,
  collective_mismatch,
  unsupported,
  placement_invalid,
  stale_record,
  corrupt_record,
  cold_start,
  backend_unavailable,
  unrecoverable,
  capacity_exceeded,
  io_failure,
};

const char* error_code_name(ErrorCode code);

/// Single exception type for the library; tests dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::shape_mismatch: return "shape mismatch";
    case ErrorCode::index_out_of_range: return "index out of range";
    case ErrorCode::size_overflow: return "size overflow";
    case ErrorCode::not_spd: return "matrix not SPD";
    case ErrorCode::numerical_breakdown: return "numerical breakdown";
    case ErrorCode::invalid_config: return "invalid config";
    case ErrorCode::epoch_violation: return "epoch violation";
    case ErrorCode::range_violation: return "window range violation";
    case ErrorCode::collective_mismatch: return "collective mismatch";
    case ErrorCode::unsupported: return "unsupported operation";
    case ErrorCode::placement_invalid: return "invalid placement";
    case ErrorCode::stale_record: return "stale recovery record";
    case ErrorCode::corrupt_record: return "corrupt recovery record";
    case ErrorCode::cold_start: return "no recovery record available";
    case ErrorCode::backend_unavailable: return "persistence backend unavailable";
    case ErrorCode::unrecoverable: return "failures exceed tolerance";
    case ErrorCode::capacity_exceeded: return "memory capacity exceeded";
    case ErrorCode::io_failure: return "i/o failure";
  }
  return "unknown error";
}

}  // namespace esrsim
