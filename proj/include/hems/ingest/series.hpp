#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "hems/core/types.hpp"

namespace hems {

/// Bridging rule for gaps between observed readings.
struct GapPolicy {
  /// Gaps up to this length are bridged by holding the last observation.
  Seconds max_hold{5};
};

/// Smallest positive spacing between consecutive timestamps (1 s when undefined).
Seconds native_resolution(std::span<const PowerSample> samples);

/// Interval of time an observed sample accounts for under the gap policy.
struct Coverage {
  Timestamp from;
  Timestamp to;
  double power_w;
};

/// Zero-order hold: each observed reading holds until the next observed one
/// when that is at most max(max_hold, native resolution) away; otherwise it
/// covers one native step. Missing readings cover nothing.
/// Samples must be one channel, sorted by timestamp.
std::vector<Coverage> coverage(std::span<const PowerSample> samples, GapPolicy policy = {});

/// Rectangular integral over [from, to) in kWh.
double integrate_kwh(std::span<const PowerSample> samples, Timestamp from, Timestamp to,
                     GapPolicy policy = {});
double integrate_kwh(std::span<const Coverage> cover, Timestamp from, Timestamp to);

/// Seconds of [from, to) covered by observed data.
Seconds observed_seconds(std::span<const Coverage> cover, Timestamp from, Timestamp to);

/// Time-weighted mean power over the observed part of [from, to); 0 when nothing was observed.
double mean_power_w(std::span<const Coverage> cover, Timestamp from, Timestamp to);

/// Stable split of a mixed sample list into per-channel sequences.
std::map<std::string, std::vector<PowerSample>> group_by_channel(std::span<const PowerSample> samples);

}  // namespace hems
