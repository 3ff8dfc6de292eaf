#include "sleepmon/sleep_analysis.hpp"

#include <algorithm>
#include <ostream>

#include "sleepmon/error.hpp"
#include "sleepmon/keyvalue.hpp"

namespace sleepmon {

std::string_view to_string(EpochClass c) {
  switch (c) {
    case EpochClass::full_posture_change: return "full_posture_changes";
    case EpochClass::limb_movement: return "limb_movements";
    case EpochClass::tiny_movement: return "tiny_movements";
    case EpochClass::calmness: return "calmness";
    case EpochClass::out_of_view: return "out_of_view";
  }
  return "?";
}

void ClassThresholds::validate() const {
  if (!(0.0 < absent && absent < tiny && tiny < limb && limb < full && full <= exit && exit <= 1.0)) {
    throw Error(Errc::invalid_parameter,
                "class thresholds must satisfy 0 < absent < tiny < limb < full <= exit <= 1");
  }
  if (min_absent_epochs < 1) throw Error(Errc::invalid_parameter, "min_absent_epochs must be >= 1");
}

std::vector<double> epoch_peaks(std::span<const double> frame_scores, int video_rate) {
  if (video_rate <= 0) throw Error(Errc::invalid_parameter, "video_rate must be positive");
  const auto rate = static_cast<std::size_t>(video_rate);
  std::vector<double> peaks(frame_scores.size() / rate);
  for (std::size_t s = 0; s < peaks.size(); ++s) {
    const auto second = frame_scores.subspan(s * rate, rate);
    peaks[s] = *std::max_element(second.begin(), second.end());
  }
  return peaks;
}

std::vector<EpochClass> classify_epochs(std::span<const double> peaks, const ClassThresholds& th) {
  th.validate();
  std::vector<EpochClass> classes(peaks.size());
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    const double p = peaks[i];
    classes[i] = p >= th.full   ? EpochClass::full_posture_change
                 : p >= th.limb ? EpochClass::limb_movement
                 : p >= th.tiny ? EpochClass::tiny_movement
                                : EpochClass::calmness;
  }

  const auto n = peaks.size();
  const auto window = static_cast<std::size_t>(th.min_absent_epochs);
  const auto spike_run_end = [&](std::size_t i) {
    while (i + 1 < n && peaks[i + 1] >= th.exit) ++i;
    return i;
  };
  std::size_t i = 0;
  while (i < n) {
    if (peaks[i] < th.exit) {
      ++i;
      continue;
    }
    const auto last_spike = spike_run_end(i);
    const auto first_absent = last_spike + 1;
    bool absent = first_absent + window <= n;
    for (std::size_t k = 0; absent && k < window; ++k) absent = peaks[first_absent + k] < th.absent;
    if (!absent) {
      i = last_spike + 1;
      continue;
    }
    std::size_t j = first_absent;
    while (j < n && peaks[j] < th.exit) classes[j++] = EpochClass::out_of_view;
    // j is the return spike (or the end); skip its whole run.
    i = j < n ? spike_run_end(j) + 1 : n;
  }
  return classes;
}

bool is_wake(EpochClass c) {
  return c == EpochClass::full_posture_change || c == EpochClass::limb_movement || c == EpochClass::out_of_view;
}

std::vector<bool> sleep_wake(std::span<const EpochClass> classes) {
  std::vector<bool> wake(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) wake[i] = is_wake(classes[i]);
  return wake;
}

double sleep_efficiency(std::span<const EpochClass> classes) {
  if (classes.empty()) throw Error(Errc::empty_input, "sleep efficiency of an empty epoch sequence");
  const auto asleep = std::count_if(classes.begin(), classes.end(), [](EpochClass c) { return !is_wake(c); });
  return static_cast<double>(asleep) / static_cast<double>(classes.size());
}

namespace {

double coverage_percent(std::span<const Event> events, std::size_t epochs) {
  if (epochs == 0) return 0.0;
  std::vector<bool> covered(epochs, false);
  for (const auto& e : events) {
    for (std::size_t s = e.start_epoch; s <= e.end_epoch && s < epochs; ++s) covered[s] = true;
  }
  const auto n = std::count(covered.begin(), covered.end(), true);
  return 100.0 * static_cast<double>(n) / static_cast<double>(epochs);
}

}  // namespace

SleepReport build_report(std::span<const EpochClass> classes, std::span<const Event> light_events,
                         std::span<const Event> noise_events, double duration_seconds) {
  SleepReport r;
  r.epochs = classes.size();
  r.duration_seconds = duration_seconds;
  if (!classes.empty()) {
    for (std::size_t k = 0; k < kEpochClasses.size(); ++k) {
      const auto n = std::count(classes.begin(), classes.end(), kEpochClasses[k]);
      r.component_percent[k] = 100.0 * static_cast<double>(n) / static_cast<double>(classes.size());
    }
    r.sleep_efficiency = sleep_efficiency(classes);
  }
  r.light_event_percent = coverage_percent(light_events, classes.size());
  r.noise_event_percent = coverage_percent(noise_events, classes.size());
  return r;
}

void write_report(std::ostream& out, const SleepReport& r, const ActigraphyColumns& actigraphy) {
  out << "# sleep analysis report\n"
      << "# duration_seconds=" << fixed(r.duration_seconds, 0) << " epochs=" << r.epochs << '\n'
      << "# cole/sadeh columns score per-minute activity counts derived from the depth scores (proxy, no wrist device)\n";
  for (auto c : kEpochClasses) out << to_string(c) << '=' << fixed(r.percent(c), 2) << '\n';
  out << "light_event=" << fixed(r.light_event_percent, 2) << '\n'
      << "noise_event=" << fixed(r.noise_event_percent, 2) << '\n'
      << "sleep_efficiency=" << fixed(r.sleep_efficiency, 4) << '\n'
      << "cole_sleep_efficiency=" << fixed(actigraphy.cole_efficiency, 4) << '\n'
      << "sadeh_sleep_efficiency=" << fixed(actigraphy.sadeh_efficiency, 4) << '\n';
}

}  // namespace sleepmon
