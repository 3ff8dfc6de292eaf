#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "sleepmon/event_detection.hpp"

namespace sleepmon {

enum class EpochClass { full_posture_change, limb_movement, tiny_movement, calmness, out_of_view };

inline constexpr std::array<EpochClass, 5> kEpochClasses = {
    EpochClass::full_posture_change, EpochClass::limb_movement, EpochClass::tiny_movement, EpochClass::calmness,
    EpochClass::out_of_view};

std::string_view to_string(EpochClass c);

struct ClassThresholds {
  double tiny = 0.005;
  double limb = 0.02;
  double full = 0.10;
  /// An epoch peak at or above this may be the subject leaving (or returning to) the bed.
  double exit = 0.30;
  /// Peaks below this count as nobody in view.
  double absent = 0.003;
  int min_absent_epochs = 10;

  /// Requires 0 < absent < tiny < limb < full <= exit <= 1 and min_absent_epochs >= 1.
  void validate() const;
  bool operator==(const ClassThresholds&) const = default;
};

/// Maximum frame score within each whole second.
std::vector<double> epoch_peaks(std::span<const double> frame_scores, int video_rate);

/// Baseline class by peak (lower-inclusive bands), then the out-of-view
/// overlay: a run of consecutive peaks >= exit followed by min_absent_epochs
/// peaks below `absent` marks everything up to the next exit-level run as
/// OutOfView. That next run is the return and cannot itself start a new
/// absence.
std::vector<EpochClass> classify_epochs(std::span<const double> peaks, const ClassThresholds& thresholds);

/// true = wake (full posture change, limb movement, out of view).
std::vector<bool> sleep_wake(std::span<const EpochClass> classes);
bool is_wake(EpochClass c);

/// Fraction of epochs that are tiny movement or calmness. Throws Error(empty_input).
double sleep_efficiency(std::span<const EpochClass> classes);

struct SleepReport {
  /// Percent of all epochs, indexed like kEpochClasses.
  std::array<double, 5> component_percent{};
  double light_event_percent = 0.0;
  double noise_event_percent = 0.0;
  double sleep_efficiency = 0.0;
  double duration_seconds = 0.0;
  std::size_t epochs = 0;

  double percent(EpochClass c) const { return component_percent[static_cast<std::size_t>(c)]; }
};

/// Light/noise columns are the percentage of epochs covered by events of that channel.
SleepReport build_report(std::span<const EpochClass> classes, std::span<const Event> light_events,
                         std::span<const Event> noise_events, double duration_seconds);

/// The two actigraphy-style efficiency columns appended to a report.
struct ActigraphyColumns {
  double cole_efficiency = 0.0;
  double sadeh_efficiency = 0.0;
};

/// key=value lines: five component percentages, light and noise percentages
/// (2 decimals), then system, Cole and Sadeh efficiencies (4 decimals).
void write_report(std::ostream& out, const SleepReport& report, const ActigraphyColumns& actigraphy);

}  // namespace sleepmon
