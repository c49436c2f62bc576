#pragma once

#include <span>
#include <vector>

#include "hems/ingest/series.hpp"
#include "hems/time.hpp"

namespace hems {

/// Cumulative energy of one local day at minute resolution.
struct DayProfile {
  Date date;
  std::vector<double> cumulative_kwh;  // minutes_in_day + 1 points, starts at 0
  Seconds unobserved{0};               // worst per-channel gap over the day

  double total() const { return cumulative_kwh.empty() ? 0.0 : cumulative_kwh.back(); }
  /// Linear within the minute; clamped to the day.
  double at(Seconds since_midnight) const;
};

/// Sums the channels' coverage over the local day `date`.
DayProfile build_day_profile(std::span<const std::vector<Coverage>> channels, Date date, const Timezone& tz);

struct EstimateOptions {
  std::size_t window_days = 7;
  Seconds max_unobserved{2 * 3600};
};

/// cumulative_so_far + mean over the latest eligible prior days of
/// (day total - that day's cumulative at the same elapsed time), never below
/// cumulative_so_far. Days with more than max_unobserved of gaps are skipped.
/// `history` holds complete days before today, oldest first.
/// ValidationError("insufficient history") when no day qualifies.
double estimate_today(std::span<const DayProfile> history, double cumulative_so_far, Seconds since_midnight,
                      const EstimateOptions& options = {});

}  // namespace hems
