#pragma once

#include <string>
#include <string_view>

#include "sleepmon/background_model.hpp"
#include "sleepmon/event_detection.hpp"
#include "sleepmon/sleep_analysis.hpp"

namespace sleepmon {

/// Every tunable of the detection and classification stages. The mixture
/// settings other than initial variance are shared by both channels.
struct PipelineConfig {
  DetectorConfig detector;
  ClassThresholds classes;
  GmmParams depth_model = GmmParams::depth_defaults();
  GmmParams luma_model = GmmParams::luma_defaults();

  /// Throws Error(invalid_parameter).
  void validate() const;
  bool operator==(const PipelineConfig&) const = default;
};

/// Overrides defaults with `key=value` lines. Unknown and repeated keys are
/// rejected (Error(invalid_parameter)); the result is validated.
PipelineConfig parse_config(std::string_view text);

/// Every key with its effective value, parseable by parse_config.
std::string format_config(const PipelineConfig& config);

}  // namespace sleepmon
