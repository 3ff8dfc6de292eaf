#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sleepmon/background_model.hpp"
#include "sleepmon/scoring.hpp"
#include "sleepmon/session_io.hpp"

namespace sleepmon {

/// Motion comes from depth, light from color, noise from audio.
enum class EventChannel { motion, light, noise };

std::string_view to_string(EventChannel channel);
/// Throws Error(malformed_input) on an unknown name.
EventChannel parse_event_channel(std::string_view name);

/// Inclusive epoch span.
struct EpochSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const EpochSpan&) const = default;
};

enum class ClipUnit { frames, samples };

/// Half-open range of recorded media. Motion clips cover the depth and color
/// streams, light clips the color stream, noise clips the audio stream.
struct Clip {
  ClipUnit unit = ClipUnit::frames;
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Clip&) const = default;
};

struct Event {
  EventChannel channel = EventChannel::motion;
  std::size_t start_epoch = 0;
  std::size_t end_epoch = 0;
  double peak_score = 0.0;
  Clip clip;
  bool operator==(const Event&) const = default;
};

struct DetectorConfig {
  double depth_threshold = 0.02;
  double color_threshold = 0.05;
  double audio_threshold = 0.10;
  double burn_in_seconds = 10.0;

  double threshold(EventChannel channel) const;
  /// Throws Error(invalid_parameter): thresholds must lie in (0, 1).
  void validate() const;
  bool operator==(const DetectorConfig&) const = default;
};

/// Per-second count of frames scoring strictly above `threshold`; a trailing
/// partial second is dropped.
std::vector<int> epochize(std::span<const double> scores, int video_rate, double threshold);

/// Epoch-comparison recurrence over per-second counts, with virtual zero
/// epochs before the first and after the last. Outside an event, epoch t
/// starts one iff count[t-1] < count[t]; inside, the event continues while
/// count[t] <= count[t+1] and otherwise ends at t, inclusive.
std::vector<EpochSpan> detect_events(std::span<const int> counts);

inline constexpr std::size_t kClipMarginSeconds = 1;

/// Media range for an event span plus a one-second margin on each side,
/// clamped to the session. Throws Error(invalid_parameter) if the span lies
/// outside the session.
Clip record_clip(EventChannel channel, const EpochSpan& span, const SessionManifest& manifest);

struct EpochCounts {
  std::vector<int> depth;
  std::vector<int> color;
  std::vector<int> audio;
  bool operator==(const EpochCounts&) const = default;
};

struct DetectionResult {
  SessionScores scores;
  /// Counts after burn-in epochs were forced to zero.
  EpochCounts counts;
  std::vector<Event> motion;
  std::vector<Event> light;
  std::vector<Event> noise;

  std::vector<Event> all_events() const;
};

/// Events from already computed scores (epochize, burn-in masking, detection, clips).
DetectionResult detect_from_scores(SessionScores scores, const SessionManifest& manifest, const DetectorConfig& config);

/// Full pipeline: score_session followed by detect_from_scores.
DetectionResult run_detector(const FrameSource& source, BackgroundModel& depth_model, BackgroundModel& color_model,
                             const DetectorConfig& config);

/// One event per line:
/// `channel=motion start_epoch=10 end_epoch=12 peak_score=0.250000 clip_start=270 clip_end=420`
void write_event_log(std::ostream& out, std::span<const Event> events);
/// Clip units are implied by the channel. Throws Error(malformed_input).
std::vector<Event> read_event_log(std::istream& in);

/// `epoch,depth,color,audio` per-second counts.
void write_epochs_csv(std::ostream& out, const EpochCounts& counts);

}  // namespace sleepmon
