#include "hems/detect/detector.hpp"

#include <fmt/format.h>

#include "hems/error.hpp"

namespace hems {

void DetectorConfig::validate() const {
  if (!(on_threshold_w > 0.0)) throw ValidationError("on_threshold must be positive");
  if (!(off_threshold_w > 0.0)) throw ValidationError("off_threshold must be positive");
  if (off_threshold_w > on_threshold_w) throw ValidationError("off_threshold must not exceed on_threshold");
  if (min_duration <= Seconds{0}) throw ValidationError("min_duration must be positive");
  if (merge_gap < Seconds{0}) throw ValidationError("merge_gap must not be negative");
}

std::vector<UsageEvent> detect_events(std::span<const PowerSample> samples, const DetectorConfig& cfg) {
  cfg.validate();
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].channel_id != samples[0].channel_id) {
      throw ValidationError("detect_events expects samples of a single device");
    }
    if (samples[i].timestamp <= samples[i - 1].timestamp) {
      throw ValidationError(fmt::format("samples of '{}' are not strictly increasing at {}",
                                        samples[i].channel_id, format_iso8601(samples[i].timestamp)));
    }
  }

  const auto cover = coverage(samples, cfg.gaps);
  std::vector<UsageEvent> events;
  if (cover.empty()) return events;
  const auto& device = samples.front().channel_id;

  bool active = false;
  Timestamp start{};
  Timestamp active_until{};

  auto close = [&] {
    active = false;
    const auto duration = active_until - start;
    if (duration < cfg.min_duration) return;
    const double kwh = integrate_kwh(cover, start, active_until);
    if (kwh > 0.0) events.push_back({device, start, duration, kwh, std::nullopt});
  };

  for (const auto& c : cover) {
    if (active && c.from - active_until > cfg.merge_gap) close();
    if (!active) {
      if (c.power_w >= cfg.on_threshold_w) {
        active = true;
        start = c.from;
        active_until = c.to;
      }
    } else if (c.power_w >= cfg.off_threshold_w) {
      active_until = c.to;
    }
  }
  if (active) close();
  return events;
}

double compute_event_energy(std::span<const PowerSample> samples, Timestamp t_start, Seconds duration,
                            GapPolicy policy) {
  if (duration <= Seconds{0}) throw ValidationError("event span must be non-empty");
  const auto cover = coverage(samples, policy);
  const auto end = t_start + duration;
  if (observed_seconds(cover, t_start, end) == Seconds{0}) {
    throw ValidationError("event span holds no observed samples");
  }
  return integrate_kwh(cover, t_start, end);
}

double estimate_standby_power(std::span<const PowerSample> samples, const DetectorConfig& cfg) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (s.power_w && *s.power_w > 0.0 && *s.power_w < cfg.off_threshold_w) {
      sum += *s.power_w;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace hems
