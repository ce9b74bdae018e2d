#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace simgpt {

enum class ErrorCode {
  invalid_argument,
  io,
  schema,
  dimension_mismatch,
  zero_norm,
  no_candidate,
  constant_input,
  non_finite,
  sample_too_large,
  rejected_in_training_set,
  transport,
  auth,
  config,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Retries were exhausted on a transient failure (429, 5xx, connection).
// `last_status` is -1 when no HTTP response was received.
class TransportError : public Error {
 public:
  TransportError(int last_status, const std::string& message)
      : Error(ErrorCode::transport, message), last_status_(last_status) {}

  int last_status() const noexcept { return last_status_; }

 private:
  int last_status_;
};

}  // namespace simgpt
