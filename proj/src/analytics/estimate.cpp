#include "hems/analytics/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "hems/error.hpp"

namespace hems {

using namespace std::chrono;

double DayProfile::at(Seconds since_midnight) const {
  if (cumulative_kwh.empty()) return 0.0;
  const auto s = std::max<std::int64_t>(0, since_midnight.count());
  const auto minute = static_cast<std::size_t>(s / 60);
  if (minute + 1 >= cumulative_kwh.size()) return cumulative_kwh.back();
  const double frac = static_cast<double>(s % 60) / 60.0;
  return cumulative_kwh[minute] + frac * (cumulative_kwh[minute + 1] - cumulative_kwh[minute]);
}

DayProfile build_day_profile(std::span<const std::vector<Coverage>> channels, Date date, const Timezone& tz) {
  DayProfile p;
  p.date = date;
  const Timestamp start = tz.start_of_day(date);
  const Timestamp end = tz.start_of_day(date + days{1});
  const auto minutes = static_cast<std::size_t>((end - start).count() / 60);
  std::vector<double> bucket(minutes, 0.0);

  Seconds worst_gap{0};
  for (const auto& cover : channels) {
    worst_gap = std::max(worst_gap, (end - start) - observed_seconds(cover, start, end));
    auto it = std::lower_bound(cover.begin(), cover.end(), start,
                               [](const Coverage& c, Timestamp t) { return c.to <= t; });
    for (; it != cover.end() && it->from < end; ++it) {
      auto a = std::max(it->from, start);
      const auto b = std::min(it->to, end);
      while (a < b) {
        const auto m = static_cast<std::size_t>((a - start).count() / 60);
        const auto minute_end = start + Seconds{static_cast<std::int64_t>(m + 1) * 60};
        const auto seg_end = std::min(minute_end, b);
        bucket[m] += it->power_w * static_cast<double>((seg_end - a).count()) / 3.6e6;
        a = seg_end;
      }
    }
  }
  if (channels.empty()) worst_gap = end - start;
  p.unobserved = worst_gap;
  p.cumulative_kwh.resize(minutes + 1, 0.0);
  for (std::size_t m = 0; m < minutes; ++m) p.cumulative_kwh[m + 1] = p.cumulative_kwh[m] + bucket[m];
  return p;
}

double estimate_today(std::span<const DayProfile> history, double cumulative_so_far, Seconds since_midnight,
                      const EstimateOptions& options) {
  double remaining = 0.0;
  std::size_t used = 0;
  for (auto it = history.rbegin(); it != history.rend() && used < options.window_days; ++it) {
    if (it->unobserved > options.max_unobserved) continue;
    remaining += it->total() - it->at(since_midnight);
    ++used;
  }
  if (used == 0) throw ValidationError("insufficient history");
  return std::max(cumulative_so_far, cumulative_so_far + remaining / static_cast<double>(used));
}

}  // namespace hems
