#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sleepmon/actigraphy.hpp"
#include "sleepmon/config.hpp"
#include "sleepmon/event_detection.hpp"
#include "sleepmon/scoring.hpp"
#include "sleepmon/sleep_analysis.hpp"

namespace sleepmon::cli {

enum ExitCode { kOk = 0, kDomainError = 1, kUsageError = 2 };

// File names inside a detection output directory.
inline constexpr const char* kEventsFile = "events.log";
inline constexpr const char* kScoresFile = "scores.csv";
inline constexpr const char* kEpochsFile = "epochs.csv";
inline constexpr const char* kAppliedConfigFile = "config.applied";
inline constexpr const char* kReportFile = "report.txt";
// Inside a generated session directory, next to the session files.
inline constexpr const char* kGroundTruthFile = "groundtruth.log";
inline constexpr const char* kScenarioFile = "scenario.txt";

/// Everything `report` derives from a depth score series and the detected
/// light/noise events. Needs at least one minute of frames.
struct Analysis {
  std::vector<EpochClass> classes;
  SleepReport report;
  ActivityCounts activity;
  WakeSeries cole;
  WakeSeries sadeh;
  ActigraphyColumns actigraphy;
};

Analysis analyze(std::span<const double> depth_scores, std::span<const Event> light, std::span<const Event> noise,
                 int video_rate, const ClassThresholds& thresholds);

struct ChannelMatch {
  EventChannel channel = EventChannel::motion;
  std::size_t detected = 0;
  std::size_t truth = 0;
  std::size_t matched = 0;
  /// 1 when there is nothing to get wrong (no detections / no truth events).
  double precision() const;
  double recall() const;
};

/// One-to-one matching per channel: detections in start order each take the
/// earliest unmatched truth event of the same channel whose span, widened by
/// `tolerance` epochs on both sides, overlaps it.
std::vector<ChannelMatch> match_events(std::span<const Event> detected, std::span<const Event> truth,
                                       std::size_t tolerance);

/// Runs one command line (`args` excludes the program name). Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sleepmon::cli
