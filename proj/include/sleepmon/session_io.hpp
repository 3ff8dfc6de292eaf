#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sleepmon/image.hpp"

namespace sleepmon {

struct SessionManifest {
  int depth_width = 640;
  int depth_height = 480;
  int color_width = 640;
  int color_height = 480;
  int video_rate = 30;
  int audio_rate = 16000;
  std::size_t frame_count = 0;
  Rect roi{160, 65, 320, 350};
  std::string depth_file = "depth.raw";
  std::string color_file = "color.raw";
  std::string audio_file = "audio.raw";

  /// Throws Error(corrupt_session) on rate/roi violations.
  void validate() const;
  /// floor(frame_count * audio_rate / video_rate): the end of the last audio chunk.
  std::size_t audio_sample_count() const;
  std::size_t whole_seconds() const { return frame_count / static_cast<std::size_t>(video_rate); }
  std::size_t depth_frame_pixels() const { return static_cast<std::size_t>(depth_width) * depth_height; }
  std::size_t color_frame_pixels() const { return static_cast<std::size_t>(color_width) * color_height; }

  bool operator==(const SessionManifest&) const = default;
};

inline constexpr const char* kManifestFile = "manifest.txt";

std::string format_manifest(const SessionManifest& manifest);
/// Throws Error(corrupt_session) on unknown, missing or duplicate keys.
SessionManifest parse_manifest(std::string_view text);

/// Random-access view over a synchronized depth/color/audio recording.
/// Implementations are read-only and safe to share between threads.
class FrameSource {
 public:
  virtual ~FrameSource() = default;

  virtual const SessionManifest& manifest() const = 0;
  virtual DepthFrame depth_frame(std::size_t index) const = 0;
  virtual ColorFrame color_frame(std::size_t index) const = 0;
  /// Samples [begin, end); throws Error(audio_underrun) past the stream end.
  virtual std::vector<std::int16_t> audio(std::size_t begin, std::size_t end) const = 0;
  virtual std::size_t audio_length() const = 0;

  /// ROI crops. Sources able to render a sub-rectangle directly override these.
  virtual DepthFrame depth_roi(std::size_t index) const { return crop_roi(depth_frame(index), manifest().roi); }
  virtual ColorFrame color_roi(std::size_t index) const { return crop_roi(color_frame(index), manifest().roi); }
};

/// Fully materialized session.
class Session final : public FrameSource {
 public:
  Session() = default;
  Session(SessionManifest manifest, std::vector<DepthFrame> depth, std::vector<ColorFrame> color,
          std::vector<std::int16_t> audio);

  /// Checks every type invariant: frame counts and dimensions against the
  /// manifest, depth range, exact audio length.
  void validate() const;

  const SessionManifest& manifest() const override { return manifest_; }
  DepthFrame depth_frame(std::size_t index) const override;
  ColorFrame color_frame(std::size_t index) const override;
  std::vector<std::int16_t> audio(std::size_t begin, std::size_t end) const override;
  std::size_t audio_length() const override { return audio_.size(); }

  const std::vector<DepthFrame>& depth_frames() const { return depth_; }
  const std::vector<ColorFrame>& color_frames() const { return color_; }
  const std::vector<std::int16_t>& audio_samples() const { return audio_; }

  bool operator==(const Session& other) const;

 private:
  SessionManifest manifest_;
  std::vector<DepthFrame> depth_;
  std::vector<ColorFrame> color_;
  std::vector<std::int16_t> audio_;
};

/// Lazily reads frames from a session directory. Opening checks file sizes
/// against the manifest and scans the depth stream once for range errors, so
/// every error load_session reports is reported here too.
class SessionReader final : public FrameSource {
 public:
  explicit SessionReader(const std::filesystem::path& dir);

  const SessionManifest& manifest() const override { return manifest_; }
  DepthFrame depth_frame(std::size_t index) const override;
  ColorFrame color_frame(std::size_t index) const override;
  std::vector<std::int16_t> audio(std::size_t begin, std::size_t end) const override;
  std::size_t audio_length() const override { return manifest_.audio_sample_count(); }
  DepthFrame depth_roi(std::size_t index) const override;
  ColorFrame color_roi(std::size_t index) const override;

 private:
  std::filesystem::path dir_;
  SessionManifest manifest_;
};

/// Eager load. Errors: "corrupt session" (missing/unreadable files or
/// manifest), "invalid depth sample" (> 2047), "manifest mismatch" (sizes).
Session load_session(const std::filesystem::path& dir);

/// Copies any source into memory.
Session materialize(const FrameSource& source);

/// Writes manifest + three raw streams. The whole source is validated before
/// the first byte is written.
void write_session(const FrameSource& source, const std::filesystem::path& dir);

/// RIFF/WAVE mono 16-bit PCM, used for recorded noise clips.
void write_wav(const std::filesystem::path& file, std::span<const std::int16_t> samples, int sample_rate);

}  // namespace sleepmon
