#pragma once

#include <stdexcept>
#include <string>

namespace sleepmon {

enum class Errc {
  corrupt_session,
  invalid_depth_sample,
  manifest_mismatch,
  roi_out_of_range,
  invalid_parameter,
  dimension_mismatch,
  audio_underrun,
  empty_input,
  invalid_timeline,
  unknown_preset,
  malformed_input,
  io_error,
};

/// Domain error raised by every module. The message starts with the
/// canonical error phrase (e.g. "corrupt session") followed by detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sleepmon
