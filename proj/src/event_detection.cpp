#include "sleepmon/event_detection.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "sleepmon/error.hpp"
#include "sleepmon/keyvalue.hpp"

namespace sleepmon {

std::string_view to_string(EventChannel channel) {
  switch (channel) {
    case EventChannel::motion: return "motion";
    case EventChannel::light: return "light";
    case EventChannel::noise: return "noise";
  }
  return "?";
}

EventChannel parse_event_channel(std::string_view name) {
  if (name == "motion") return EventChannel::motion;
  if (name == "light") return EventChannel::light;
  if (name == "noise") return EventChannel::noise;
  throw Error(Errc::malformed_input, "unknown event channel '" + std::string(name) + "'");
}

double DetectorConfig::threshold(EventChannel channel) const {
  switch (channel) {
    case EventChannel::motion: return depth_threshold;
    case EventChannel::light: return color_threshold;
    case EventChannel::noise: return audio_threshold;
  }
  return 1.0;
}

void DetectorConfig::validate() const {
  const auto check = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw Error(Errc::invalid_parameter, std::string(name) + " out of range (0, 1)");
  };
  check(depth_threshold, "depth_threshold");
  check(color_threshold, "color_threshold");
  check(audio_threshold, "audio_threshold");
  if (!(burn_in_seconds >= 0.0)) throw Error(Errc::invalid_parameter, "burn_in_seconds must be >= 0");
}

std::vector<int> epochize(std::span<const double> scores, int video_rate, double threshold) {
  if (video_rate <= 0) throw Error(Errc::invalid_parameter, "video_rate must be positive");
  const auto rate = static_cast<std::size_t>(video_rate);
  std::vector<int> counts(scores.size() / rate, 0);
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const auto second = scores.subspan(s * rate, rate);
    counts[s] = static_cast<int>(std::count_if(second.begin(), second.end(), [&](double v) { return v > threshold; }));
  }
  return counts;
}

std::vector<EpochSpan> detect_events(std::span<const int> counts) {
  const auto n = counts.size();
  const auto at = [&](std::ptrdiff_t t) { return t < 0 || t >= static_cast<std::ptrdiff_t>(n) ? 0 : counts[t]; };
  std::vector<EpochSpan> spans;
  bool inside = false;
  std::size_t start = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto i = static_cast<std::ptrdiff_t>(t);
    if (!inside && at(i - 1) < at(i)) {
      inside = true;
      start = t;
    }
    if (inside && !(at(i) <= at(i + 1))) {
      spans.push_back({start, t});
      inside = false;
    }
  }
  // No event is left open: an open event has a positive, non-decreasing count,
  // which the trailing virtual zero always ends.
  return spans;
}

Clip record_clip(EventChannel channel, const EpochSpan& span, const SessionManifest& manifest) {
  const auto seconds = manifest.whole_seconds();
  if (span.start > span.end || span.end >= seconds) {
    throw Error(Errc::invalid_parameter, "event span [" + std::to_string(span.start) + ", " + std::to_string(span.end) +
                                             "] outside session of " + std::to_string(seconds) + " s");
  }
  const auto first_second = span.start >= kClipMarginSeconds ? span.start - kClipMarginSeconds : 0;
  const auto last_second = span.end + 1 + kClipMarginSeconds;  // exclusive
  if (channel == EventChannel::noise) {
    const auto rate = static_cast<std::size_t>(manifest.audio_rate);
    return {ClipUnit::samples, first_second * rate, std::min(last_second * rate, manifest.audio_sample_count())};
  }
  const auto rate = static_cast<std::size_t>(manifest.video_rate);
  return {ClipUnit::frames, first_second * rate, std::min(last_second * rate, manifest.frame_count)};
}

std::vector<Event> DetectionResult::all_events() const {
  std::vector<Event> out;
  out.reserve(motion.size() + light.size() + noise.size());
  out.insert(out.end(), motion.begin(), motion.end());
  out.insert(out.end(), light.begin(), light.end());
  out.insert(out.end(), noise.begin(), noise.end());
  return out;
}

DetectionResult detect_from_scores(SessionScores scores, const SessionManifest& manifest,
                                   const DetectorConfig& config) {
  config.validate();
  DetectionResult result;
  result.scores = std::move(scores);
  const auto rate = static_cast<std::size_t>(manifest.video_rate);
  const auto burn_in_epochs =
      static_cast<std::size_t>(std::ceil(std::max(0.0, config.burn_in_seconds) - 1e-9));

  const auto channel_events = [&](EventChannel channel, const ScoreSeries& series, std::vector<int>& counts) {
    counts = epochize(series.values, manifest.video_rate, config.threshold(channel));
    std::fill(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(std::min(burn_in_epochs, counts.size())), 0);
    std::vector<Event> events;
    for (const auto& span : detect_events(counts)) {
      Event e;
      e.channel = channel;
      e.start_epoch = span.start;
      e.end_epoch = span.end;
      const auto first = series.values.begin() + static_cast<std::ptrdiff_t>(span.start * rate);
      const auto last = series.values.begin() + static_cast<std::ptrdiff_t>((span.end + 1) * rate);
      e.peak_score = *std::max_element(first, last);
      e.clip = record_clip(channel, span, manifest);
      events.push_back(e);
    }
    return events;
  };
  result.motion = channel_events(EventChannel::motion, result.scores.depth, result.counts.depth);
  result.light = channel_events(EventChannel::light, result.scores.color, result.counts.color);
  result.noise = channel_events(EventChannel::noise, result.scores.audio, result.counts.audio);
  return result;
}

DetectionResult run_detector(const FrameSource& source, BackgroundModel& depth_model, BackgroundModel& color_model,
                             const DetectorConfig& config) {
  config.validate();
  auto scores = score_session(source, depth_model, color_model, ScoringOptions{config.burn_in_seconds});
  return detect_from_scores(std::move(scores), source.manifest(), config);
}

void write_event_log(std::ostream& out, std::span<const Event> events) {
  for (const auto& e : events) {
    out << "channel=" << to_string(e.channel) << " start_epoch=" << e.start_epoch << " end_epoch=" << e.end_epoch
        << " peak_score=" << fixed(e.peak_score, 6) << " clip_start=" << e.clip.begin << " clip_end=" << e.clip.end
        << '\n';
  }
}

std::vector<Event> read_event_log(std::istream& in) {
  static constexpr const char* kFields[] = {"channel", "start_epoch", "end_epoch", "peak_score", "clip_start",
                                            "clip_end"};
  std::vector<Event> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream tokens(line);
    std::string token;
    std::string values[6];
    int field = 0;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (field >= 6 || eq == std::string::npos || token.substr(0, eq) != kFields[field]) {
        throw Error(Errc::malformed_input, "event log line " + std::to_string(line_no) + ": unexpected '" + token + "'");
      }
      values[field++] = token.substr(eq + 1);
    }
    if (field != 6) throw Error(Errc::malformed_input, "event log line " + std::to_string(line_no) + ": missing fields");
    Event e;
    e.channel = parse_event_channel(values[0]);
    const auto non_negative = [&](int i) {
      const auto v = parse_integer(kFields[i], values[i]);
      if (v < 0) throw Error(Errc::malformed_input, std::string(kFields[i]) + " must be >= 0");
      return static_cast<std::size_t>(v);
    };
    e.start_epoch = non_negative(1);
    e.end_epoch = non_negative(2);
    e.peak_score = parse_double(kFields[3], values[3]);
    e.clip = {e.channel == EventChannel::noise ? ClipUnit::samples : ClipUnit::frames, non_negative(4), non_negative(5)};
    if (e.start_epoch > e.end_epoch || e.clip.begin > e.clip.end) {
      throw Error(Errc::malformed_input, "event log line " + std::to_string(line_no) + ": reversed span");
    }
    events.push_back(e);
  }
  return events;
}

void write_epochs_csv(std::ostream& out, const EpochCounts& counts) {
  out << "epoch,depth,color,audio\n";
  for (std::size_t s = 0; s < counts.depth.size(); ++s) {
    out << s << ',' << counts.depth[s] << ',' << counts.color[s] << ',' << counts.audio[s] << '\n';
  }
}

}  // namespace sleepmon
