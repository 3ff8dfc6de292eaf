#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sleepmon/background_model.hpp"
#include "sleepmon/session_io.hpp"

namespace sleepmon {

enum class ScoreChannel { depth, color, audio };

/// Per-frame-slot scores in [0, 1].
struct ScoreSeries {
  ScoreChannel channel = ScoreChannel::depth;
  std::vector<double> values;
  bool operator==(const ScoreSeries&) const = default;
};

struct SessionScores {
  ScoreSeries depth{ScoreChannel::depth, {}};
  ScoreSeries color{ScoreChannel::color, {}};
  ScoreSeries audio{ScoreChannel::audio, {}};
  /// Frames [0, burn_in_frames) were computed while the models warmed up.
  std::size_t burn_in_frames = 0;

  std::size_t size() const { return depth.values.size(); }
  bool operator==(const SessionScores&) const = default;
};

/// Half-open sample window [begin, end).
struct SampleRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const SampleRange&) const = default;
};

/// foreground_area(mask) / roi_area.
double visual_score(const ForegroundMask& mask, std::size_t roi_area);

/// Chunk i covers [floor(i*audio_rate/video_rate), floor((i+1)*audio_rate/video_rate)).
/// Throws Error(audio_underrun) naming the first chunk the stream cannot fill.
std::vector<SampleRange> chunk_audio(std::size_t sample_count, int audio_rate, int video_rate, std::size_t frame_count);

/// RMS / 32768, clamped to [0, 1]. Throws Error(empty_input) on an empty chunk.
double audio_score(std::span<const std::int16_t> chunk);

struct ScoringOptions {
  double burn_in_seconds = 10.0;
};

/// Both models must have been seeded on frame 0 of `source`'s ROI.
SessionScores score_session(const FrameSource& source, BackgroundModel& depth_model, BackgroundModel& color_model,
                            const ScoringOptions& options = {});

/// Seeds a depth and a luma model on frame 0 of the source ROI.
struct ModelPair {
  BackgroundModel depth;
  BackgroundModel color;
};
ModelPair make_models(const FrameSource& source, const GmmParams& depth_params, const GmmParams& luma_params,
                      Execution execution = Execution::parallel);

/// `frame,depth,color,audio` with 6 decimals.
void write_scores_csv(std::ostream& out, const SessionScores& scores);
/// Throws Error(malformed_input).
SessionScores read_scores_csv(std::istream& in);

}  // namespace sleepmon
