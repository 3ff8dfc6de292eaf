#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sleepmon/event_detection.hpp"
#include "sleepmon/session_io.hpp"
#include "sleepmon/sleep_analysis.hpp"

namespace sleepmon {

enum class ItemKind { calm, tiny_twitch, limb_move, full_turn, leave_bed, return_bed, light_on, light_off, talk };

std::string_view to_string(ItemKind kind);
/// Throws Error(invalid_timeline).
ItemKind parse_item_kind(std::string_view name);

/// Scripted interval [start, end) in whole seconds.
///
/// magnitude: fraction of the ROI disturbed for body movements (tiny
/// 0.005-0.015, limb 0.03-0.08, full turn 0.15 up to 0.30, leave/return
/// 0.30-1.0, calm 0); luma step in 8-bit levels for light items; peak
/// amplitude as a fraction of full scale for talk (>= 0.2).
struct TimelineItem {
  int start = 0;
  int end = 0;
  ItemKind kind = ItemKind::calm;
  double magnitude = 0.0;
  bool operator==(const TimelineItem&) const = default;
};

struct Scenario {
  int duration = 60;
  std::uint64_t seed = 1;
  std::vector<TimelineItem> timeline;
  double depth_noise = 2.0;    ///< sigma, depth units
  double luma_noise = 1.5;     ///< sigma, luma levels
  double audio_noise = 0.003;  ///< sigma, fraction of full scale
  double body_fraction = 0.36;  ///< area of the in-bed body as a fraction of the ROI
  int ambient_luma = 25;
  int frame_width = 640;
  int frame_height = 480;
  Rect roi{160, 65, 320, 350};
  int video_rate = 30;
  int audio_rate = 16000;

  /// Throws Error(invalid_timeline) naming the offending item.
  void validate() const;
  SessionManifest manifest() const;
  bool operator==(const Scenario&) const = default;
};

std::string format_scenario(const Scenario& scenario);
/// Throws Error(invalid_timeline) / Error(malformed_input).
Scenario parse_scenario(std::string_view text);

struct GroundTruth {
  std::vector<Event> motion;
  std::vector<Event> light;
  std::vector<Event> noise;
  std::vector<EpochClass> epoch_classes;
  double sleep_efficiency = 0.0;

  std::vector<Event> all_events() const;
};

/// Procedurally rendered session: every pixel and sample is a pure function
/// of (scenario, frame or sample index), so frames can be produced in any
/// order and ROI crops are rendered directly.
class SyntheticSession final : public FrameSource {
 public:
  explicit SyntheticSession(Scenario scenario);

  const SessionManifest& manifest() const override { return manifest_; }
  DepthFrame depth_frame(std::size_t index) const override;
  ColorFrame color_frame(std::size_t index) const override;
  std::vector<std::int16_t> audio(std::size_t begin, std::size_t end) const override;
  std::size_t audio_length() const override { return manifest_.audio_sample_count(); }
  DepthFrame depth_roi(std::size_t index) const override;
  ColorFrame color_roi(std::size_t index) const override;

  const Scenario& scenario() const { return scenario_; }
  const Rect& body() const { return body_; }
  /// Disturbed rectangle of timeline item i (empty for non-body items).
  const Rect& item_region(std::size_t i) const { return regions_[i]; }

 private:
  struct FrameState {
    int flicker_item = -1;  ///< timeline index whose region flickers in this frame
    bool body_present = true;
    int luma_level = 0;
  };

  DepthFrame render_depth(std::size_t index, const Rect& area) const;
  ColorFrame render_color(std::size_t index, const Rect& area) const;

  Scenario scenario_;
  SessionManifest manifest_;
  Rect body_;
  std::vector<Rect> regions_;
  std::vector<std::size_t> flicker_start_frame_;
  std::vector<FrameState> frames_;
  std::vector<std::int16_t> depth_noise_;
  std::vector<std::int16_t> luma_noise_;
  std::vector<std::int16_t> audio_noise_;
};

/// Ground truth derived from the timeline alone.
GroundTruth ground_truth(const Scenario& scenario);

std::pair<SyntheticSession, GroundTruth> generate(const Scenario& scenario);

enum class PresetName { posture_test, trouble_sleeping, successful_sleeping };

/// Throws Error(unknown_preset) listing the valid names.
PresetName parse_preset_name(std::string_view name);

/// Fixed timelines for the three protocol presets. `duration` only applies to
/// successful_sleeping (default 1200 s, up to 6 h).
Scenario preset(PresetName name, std::uint64_t seed = 1, std::optional<int> duration = std::nullopt);
Scenario preset(std::string_view name, std::uint64_t seed = 1, std::optional<int> duration = std::nullopt);

}  // namespace sleepmon
