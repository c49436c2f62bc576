#pragma once

#include <span>
#include <vector>

#include "hems/core/types.hpp"
#include "hems/ingest/series.hpp"

namespace hems {

/// Hysteresis thresholds for edge detection on a single device stream.
struct DetectorConfig {
  double on_threshold_w = 15.0;
  double off_threshold_w = 10.0;
  Seconds min_duration{60};
  Seconds merge_gap{30};
  GapPolicy gaps;

  /// Throws ValidationError unless 0 < off <= on, min_duration > 0, merge_gap >= 0.
  void validate() const;
};

/// Events open when power reaches on_threshold and close once power has
/// stayed below off_threshold (or unobserved) for longer than merge_gap.
/// The event ends where the last at-or-above-off reading stops covering.
/// Events shorter than min_duration are dropped.
///
/// Samples must belong to one channel with strictly increasing timestamps;
/// otherwise ValidationError.
std::vector<UsageEvent> detect_events(std::span<const PowerSample> samples, const DetectorConfig& cfg);

/// Rectangular integral of the samples over [t_start, t_start + duration).
/// Throws ValidationError when the span is empty or has no observed data.
double compute_event_energy(std::span<const PowerSample> samples, Timestamp t_start, Seconds duration,
                            GapPolicy policy = {});

/// Mean of the positive readings below off_threshold; 0 when there are none.
double estimate_standby_power(std::span<const PowerSample> samples, const DetectorConfig& cfg);

}  // namespace hems
