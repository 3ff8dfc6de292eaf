#include "sleepmon/actigraphy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "sleepmon/error.hpp"

namespace sleepmon {
namespace {

// Zero outside the recording.
std::int64_t count_at(std::span<const std::int64_t> counts, std::ptrdiff_t t) {
  return t < 0 || t >= static_cast<std::ptrdiff_t>(counts.size()) ? 0 : counts[static_cast<std::size_t>(t)];
}

}  // namespace

ActivityCounts counts_from_scores(std::span<const double> depth_scores, int video_rate, double tiny_threshold) {
  if (video_rate <= 0) throw Error(Errc::invalid_parameter, "video_rate must be positive");
  const auto per_minute = static_cast<std::size_t>(video_rate) * 60;
  const auto minutes = depth_scores.size() / per_minute;
  if (minutes == 0) {
    throw Error(Errc::empty_input, "activity counts need at least one minute of scores, got " +
                                       std::to_string(depth_scores.size()) + " frames");
  }
  ActivityCounts counts(minutes);
  for (std::size_t m = 0; m < minutes; ++m) {
    double excess = 0.0;
    for (auto s : depth_scores.subspan(m * per_minute, per_minute)) excess += std::max(s - tiny_threshold, 0.0);
    counts[m] = std::llround(1000.0 * excess);
  }
  return counts;
}

WakeSeries cole_sleep_wake(std::span<const std::int64_t> counts) {
  // Weights for offsets -4..+2.
  static constexpr std::array<double, 7> kWeights = {106, 54, 58, 76, 230, 74, 67};
  WakeSeries wake(counts.size());
  for (std::size_t t = 0; t < counts.size(); ++t) {
    double weighted = 0.0;
    for (std::size_t k = 0; k < kWeights.size(); ++k) {
      weighted += kWeights[k] * static_cast<double>(count_at(counts, static_cast<std::ptrdiff_t>(t + k) - 4));
    }
    wake[t] = !(0.001 * weighted < 1.0);
  }
  return wake;
}

WakeSeries sadeh_sleep_wake(std::span<const std::int64_t> counts) {
  WakeSeries wake(counts.size());
  for (std::size_t t = 0; t < counts.size(); ++t) {
    const auto center = static_cast<std::ptrdiff_t>(t);
    double sum = 0.0;
    int nat = 0;
    for (std::ptrdiff_t k = -5; k <= 5; ++k) {
      const auto a = count_at(counts, center + k);
      sum += static_cast<double>(a);
      if (a >= 50 && a < 100) ++nat;
    }
    const double avg = sum / 11.0;

    double trailing_mean = 0.0;
    for (std::ptrdiff_t k = -5; k <= 0; ++k) trailing_mean += static_cast<double>(count_at(counts, center + k));
    trailing_mean /= 6.0;
    double ss = 0.0;
    for (std::ptrdiff_t k = -5; k <= 0; ++k) {
      const double d = static_cast<double>(count_at(counts, center + k)) - trailing_mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / 5.0);

    const double lg = std::log(static_cast<double>(counts[t]) + 1.0);
    const double ps = 7.601 - 0.065 * avg - 1.08 * nat - 0.056 * sd - 0.703 * lg;
    wake[t] = !(ps >= 0.0);
  }
  return wake;
}

double wake_series_efficiency(const WakeSeries& wake) {
  if (wake.empty()) throw Error(Errc::empty_input, "efficiency of an empty wake series");
  const auto asleep = std::count(wake.begin(), wake.end(), false);
  return static_cast<double>(asleep) / static_cast<double>(wake.size());
}

bool EfficiencyComparison::divergent(double tolerance) const {
  return system_vs_cole > tolerance || system_vs_sadeh > tolerance || cole_vs_sadeh > tolerance;
}

EfficiencyComparison compare_efficiencies(double system_efficiency, double cole_efficiency, double sadeh_efficiency) {
  EfficiencyComparison c;
  c.system = system_efficiency;
  c.cole = cole_efficiency;
  c.sadeh = sadeh_efficiency;
  c.system_vs_cole = std::abs(c.system - c.cole);
  c.system_vs_sadeh = std::abs(c.system - c.sadeh);
  c.cole_vs_sadeh = std::abs(c.cole - c.sadeh);
  return c;
}

EfficiencyComparison compare_efficiencies(double system_efficiency, const WakeSeries& cole, const WakeSeries& sadeh) {
  return compare_efficiencies(system_efficiency, wake_series_efficiency(cole), wake_series_efficiency(sadeh));
}

}  // namespace sleepmon
