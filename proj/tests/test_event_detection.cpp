#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sleepmon/error.hpp"
#include "sleepmon/event_detection.hpp"

using namespace sleepmon;

namespace {

std::vector<std::pair<std::size_t, std::size_t>> pairs(const std::vector<EpochSpan>& spans) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& s : spans) out.emplace_back(s.start, s.end);
  return out;
}

SessionManifest manifest_seconds(std::size_t seconds) {
  SessionManifest m;
  m.frame_count = seconds * 30;
  return m;
}

}  // namespace

TEST(Epochize, Examples) {
  EXPECT_EQ(epochize(std::vector<double>(90, 0.0), 30, 0.05), (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(epochize(std::vector<double>(30, 0.5), 30, 0.05), (std::vector<int>{30}));
  std::vector<double> mixed(10, 0.3);
  mixed.resize(30, 0.0);
  EXPECT_EQ(epochize(mixed, 30, 0.1), (std::vector<int>{10}));
  // Strictly above; trailing partial second dropped.
  EXPECT_EQ(epochize(std::vector<double>(45, 0.1), 30, 0.1), (std::vector<int>{0}));
}

TEST(Epochize, RaisingThresholdNeverRaisesCounts) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores(300);
  for (auto& s : scores) s = u(rng) * u(rng);
  for (double lo = 0.01; lo < 0.9; lo += 0.07) {
    const auto a = epochize(scores, 30, lo);
    const auto b = epochize(scores, 30, lo + 0.05);
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_LE(b[i], a[i]);
      ASSERT_LE(a[i], 30);
    }
  }
}

TEST(DetectEvents, Examples) {
  EXPECT_EQ(pairs(detect_events(std::vector<int>{0, 0, 2, 3, 3, 1, 0})),
            (std::vector<std::pair<std::size_t, std::size_t>>{{2, 4}}));
  EXPECT_TRUE(detect_events(std::vector<int>(50, 0)).empty());
  EXPECT_EQ(pairs(detect_events(std::vector<int>{5})), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}}));
  // An isolated spike is a length-one event.
  EXPECT_EQ(pairs(detect_events(std::vector<int>{0, 7, 0})), (std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}}));
}

TEST(DetectEvents, MatchesMaximalRunOracle) {
  std::mt19937 rng(2013);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto len = 1 + rng() % 40;
    std::vector<int> counts(len);
    for (auto& c : counts) c = static_cast<int>(rng() % 31);
    ASSERT_EQ(pairs(detect_events(counts)), oracle::event_runs(counts)) << "trial " << trial;
  }
}

TEST(DetectEvents, SpansDisjointAndOrdered) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> counts(100);
    for (auto& c : counts) c = static_cast<int>(rng() % 31);
    const auto spans = detect_events(counts);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      ASSERT_LE(spans[i].start, spans[i].end);
      if (i > 0) ASSERT_LT(spans[i - 1].end, spans[i].start);
    }
  }
}

TEST(RecordClip, Margins) {
  const auto m = manifest_seconds(60);
  EXPECT_EQ(record_clip(EventChannel::motion, {10, 12}, m), (Clip{ClipUnit::frames, 270, 420}));
  EXPECT_EQ(record_clip(EventChannel::noise, {5, 5}, m), (Clip{ClipUnit::samples, 64000, 112000}));
  EXPECT_EQ(record_clip(EventChannel::light, {0, 0}, m).begin, 0u);
  EXPECT_EQ(record_clip(EventChannel::light, {59, 59}, m).end, 1800u);
  EXPECT_EQ(record_clip(EventChannel::noise, {59, 59}, m).end, m.audio_sample_count());
  EXPECT_THROW(record_clip(EventChannel::motion, {60, 61}, m), Error);
}

TEST(DetectFromScores, BurnInAndPeaks) {
  SessionScores s;
  s.depth.values.assign(30 * 20, 0.0);
  s.color.values.assign(30 * 20, 0.0);
  s.audio.values.assign(30 * 20, 0.0);
  for (int f = 30 * 2; f < 30 * 3; ++f) s.depth.values[f] = 0.5;  // inside burn-in
  for (int f = 30 * 14; f < 30 * 15; ++f) s.depth.values[f] = 0.25;
  s.depth.values[30 * 14 + 3] = 0.3;
  DetectorConfig config;
  const auto r = detect_from_scores(s, manifest_seconds(20), config);
  ASSERT_EQ(r.motion.size(), 1u);
  EXPECT_EQ(r.motion[0].start_epoch, 14u);
  EXPECT_EQ(r.motion[0].end_epoch, 14u);
  EXPECT_DOUBLE_EQ(r.motion[0].peak_score, 0.3);
  EXPECT_EQ(r.counts.depth[2], 0);
  EXPECT_TRUE(r.light.empty());
  EXPECT_TRUE(r.noise.empty());
}

TEST(DetectFromScores, AudioNeverTouchesVisualEvents) {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  SessionScores s;
  for (auto* series : {&s.depth.values, &s.color.values, &s.audio.values}) {
    series->resize(30 * 40);
    for (auto& v : *series) v = u(rng);
  }
  const auto base = detect_from_scores(s, manifest_seconds(40), DetectorConfig{});
  for (auto& v : s.audio.values) v = u(rng);
  const auto changed = detect_from_scores(s, manifest_seconds(40), DetectorConfig{});
  EXPECT_EQ(base.motion, changed.motion);
  EXPECT_EQ(base.light, changed.light);
}

TEST(EventLog, RoundTrip) {
  const std::vector<Event> events = {
      {EventChannel::motion, 10, 12, 0.25, {ClipUnit::frames, 270, 420}},
      {EventChannel::light, 40, 41, 1.0, {ClipUnit::frames, 1170, 1290}},
      {EventChannel::noise, 5, 5, 0.123456, {ClipUnit::samples, 64000, 112000}},
  };
  std::stringstream io;
  write_event_log(io, events);
  EXPECT_EQ(io.str().substr(0, 90),
            "channel=motion start_epoch=10 end_epoch=12 peak_score=0.250000 clip_start=270 clip_end=420");
  EXPECT_EQ(read_event_log(io), events);
}

TEST(EventLog, Malformed) {
  for (const char* bad : {"channel=motion start_epoch=1\n", "channel=smell start_epoch=1 end_epoch=1 peak_score=0 clip_start=0 clip_end=1\n",
                          "start_epoch=1 channel=motion end_epoch=1 peak_score=0 clip_start=0 clip_end=1\n",
                          "channel=motion start_epoch=3 end_epoch=1 peak_score=0 clip_start=0 clip_end=1\n",
                          "channel=motion start_epoch=x end_epoch=1 peak_score=0 clip_start=0 clip_end=1\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(read_event_log(in), Error) << bad;
  }
}

TEST(DetectorConfig, Validation) {
  DetectorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.audio_threshold = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c = DetectorConfig{};
  c.depth_threshold = 0.0;
  EXPECT_THROW(c.validate(), Error);
}
