#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sleepmon {

/// Per-minute activity counts; true entries of a wake series mean wake.
using ActivityCounts = std::vector<std::int64_t>;
using WakeSeries = std::vector<bool>;

/// Proxy for wrist-actigraph counts built from the depth score series:
/// minute m = round(1000 * sum over its frames of max(score - tiny_threshold, 0)).
/// A trailing partial minute is dropped. Throws Error(empty_input) for
/// sessions shorter than one minute.
ActivityCounts counts_from_scores(std::span<const double> depth_scores, int video_rate, double tiny_threshold);

/// Cole-Kripke (1992), one-minute epochs:
/// D = 0.001 (106 A[t-4] + 54 A[t-3] + 58 A[t-2] + 76 A[t-1] + 230 A[t] + 74 A[t+1] + 67 A[t+2]),
/// sleep iff D < 1. Minutes outside the recording count as zero.
WakeSeries cole_sleep_wake(std::span<const std::int64_t> counts);

/// Sadeh (1994):
/// PS = 7.601 - 0.065 AVG - 1.08 NAT - 0.056 SD - 0.703 ln(A[t] + 1), sleep iff PS >= 0,
/// AVG = mean over t-5..t+5, NAT = minutes in t-5..t+5 with 50 <= A < 100,
/// SD = sample standard deviation over t-5..t. Zero padding outside the recording.
WakeSeries sadeh_sleep_wake(std::span<const std::int64_t> counts);

/// Fraction of sleep minutes. Throws Error(empty_input).
double wake_series_efficiency(const WakeSeries& wake);

struct EfficiencyComparison {
  double system = 0.0;
  double cole = 0.0;
  double sadeh = 0.0;
  double system_vs_cole = 0.0;
  double system_vs_sadeh = 0.0;
  double cole_vs_sadeh = 0.0;

  /// Any pairwise difference above `tolerance`.
  bool divergent(double tolerance = 0.10) const;
};

EfficiencyComparison compare_efficiencies(double system_efficiency, const WakeSeries& cole, const WakeSeries& sadeh);
EfficiencyComparison compare_efficiencies(double system_efficiency, double cole_efficiency, double sadeh_efficiency);

}  // namespace sleepmon
