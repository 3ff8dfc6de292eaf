#include "sleepmon/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "sleepmon/keyvalue.hpp"

namespace sleepmon {

double visual_score(const ForegroundMask& mask, std::size_t roi_area) {
  if (roi_area == 0 || roi_area != mask.size()) {
    throw Error(Errc::dimension_mismatch, "roi area " + std::to_string(roi_area) + " does not match mask size " +
                                              std::to_string(mask.size()));
  }
  return static_cast<double>(foreground_area(mask)) / static_cast<double>(roi_area);
}

std::vector<SampleRange> chunk_audio(std::size_t sample_count, int audio_rate, int video_rate,
                                     std::size_t frame_count) {
  if (audio_rate <= 0 || video_rate <= 0) throw Error(Errc::invalid_parameter, "rates must be positive");
  const auto boundary = [&](std::size_t i) {
    return i * static_cast<std::size_t>(audio_rate) / static_cast<std::size_t>(video_rate);
  };
  std::vector<SampleRange> chunks;
  chunks.reserve(frame_count);
  for (std::size_t i = 0; i < frame_count; ++i) {
    const SampleRange chunk{boundary(i), boundary(i + 1)};
    if (chunk.end > sample_count) {
      throw Error(Errc::audio_underrun, "audio underrun at chunk " + std::to_string(i) + ": needs samples up to " +
                                            std::to_string(chunk.end) + ", stream has " + std::to_string(sample_count));
    }
    chunks.push_back(chunk);
  }
  return chunks;
}

double audio_score(std::span<const std::int16_t> chunk) {
  if (chunk.empty()) throw Error(Errc::empty_input, "audio score of an empty chunk");
  double sum_sq = 0.0;
  for (auto s : chunk) sum_sq += static_cast<double>(s) * static_cast<double>(s);
  const double rms = std::sqrt(sum_sq / static_cast<double>(chunk.size()));
  return std::clamp(rms / 32768.0, 0.0, 1.0);
}

ModelPair make_models(const FrameSource& source, const GmmParams& depth_params, const GmmParams& luma_params,
                      Execution execution) {
  if (source.manifest().frame_count == 0) throw Error(Errc::empty_input, "cannot seed models on an empty session");
  return ModelPair{BackgroundModel(depth_params, source.depth_roi(0), execution),
                   BackgroundModel(luma_params, to_luma(source.color_roi(0)), execution)};
}

SessionScores score_session(const FrameSource& source, BackgroundModel& depth_model, BackgroundModel& color_model,
                            const ScoringOptions& options) {
  const auto& m = source.manifest();
  const auto roi_area = m.roi.area();
  const auto chunks = chunk_audio(source.audio_length(), m.audio_rate, m.video_rate, m.frame_count);
  const auto execution = depth_model.execution();

  SessionScores scores;
  scores.depth.values.resize(m.frame_count);
  scores.color.values.resize(m.frame_count);
  scores.audio.values.resize(m.frame_count);
  scores.burn_in_frames = std::min<std::size_t>(
      m.frame_count, static_cast<std::size_t>(std::llround(std::max(0.0, options.burn_in_seconds) * m.video_rate)));

  for (std::size_t i = 0; i < m.frame_count; ++i) {
    const auto depth_mask = depth_model.update_and_classify(source.depth_roi(i));
    scores.depth.values[i] = visual_score(morph_smooth(depth_mask, execution), roi_area);
    const auto color_mask = color_model.update_and_classify(to_luma(source.color_roi(i)));
    scores.color.values[i] = visual_score(morph_smooth(color_mask, execution), roi_area);
    const auto samples = source.audio(chunks[i].begin, chunks[i].end);
    scores.audio.values[i] = samples.empty() ? 0.0 : audio_score(samples);
  }
  return scores;
}

void write_scores_csv(std::ostream& out, const SessionScores& scores) {
  out << "frame,depth,color,audio\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out << i << ',' << fixed(scores.depth.values[i], 6) << ',' << fixed(scores.color.values[i], 6) << ','
        << fixed(scores.audio.values[i], 6) << '\n';
  }
}

SessionScores read_scores_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "frame,depth,color,audio") {
    throw Error(Errc::malformed_input, "scores csv: missing header");
  }
  SessionScores scores;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::string_view rest = line;
    std::string_view fields[4];
    for (int f = 0; f < 4; ++f) {
      const auto comma = rest.find(',');
      if ((f < 3) == (comma == std::string_view::npos)) {
        throw Error(Errc::malformed_input, "scores csv: bad row '" + line + "'");
      }
      fields[f] = rest.substr(0, comma);
      rest = f < 3 ? rest.substr(comma + 1) : std::string_view{};
    }
    if (parse_integer("frame", fields[0]) != static_cast<long long>(expected)) {
      throw Error(Errc::malformed_input, "scores csv: frames out of order at '" + line + "'");
    }
    scores.depth.values.push_back(parse_double("depth", fields[1]));
    scores.color.values.push_back(parse_double("color", fields[2]));
    scores.audio.values.push_back(parse_double("audio", fields[3]));
    ++expected;
  }
  return scores;
}

}  // namespace sleepmon
