#include "hems/ingest/series.hpp"

#include <algorithm>

namespace hems {

Seconds native_resolution(std::span<const PowerSample> samples) {
  Seconds best = Seconds::max();
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto d = samples[i].timestamp - samples[i - 1].timestamp;
    if (d > Seconds{0} && d < best) best = d;
  }
  return best == Seconds::max() ? Seconds{1} : best;
}

std::vector<Coverage> coverage(std::span<const PowerSample> samples, GapPolicy policy) {
  const Seconds step = native_resolution(samples);
  const Seconds bridge = std::max(policy.max_hold, step);
  std::vector<Coverage> out;
  out.reserve(samples.size());

  std::size_t i = 0;
  while (i < samples.size() && !samples[i].power_w) ++i;
  while (i < samples.size()) {
    std::size_t j = i + 1;
    while (j < samples.size() && !samples[j].power_w) ++j;
    const Timestamp t = samples[i].timestamp;
    Timestamp end = t + step;
    if (j < samples.size()) {
      const auto gap = samples[j].timestamp - t;
      if (gap <= bridge) end = samples[j].timestamp;
    }
    out.push_back({t, end, *samples[i].power_w});
    i = j;
  }
  return out;
}

double integrate_kwh(std::span<const Coverage> cover, Timestamp from, Timestamp to) {
  if (to <= from) return 0.0;
  auto it = std::lower_bound(cover.begin(), cover.end(), from,
                             [](const Coverage& c, Timestamp t) { return c.to <= t; });
  double joules = 0.0;
  for (; it != cover.end() && it->from < to; ++it) {
    const auto a = std::max(it->from, from);
    const auto b = std::min(it->to, to);
    if (b > a) joules += it->power_w * static_cast<double>((b - a).count());
  }
  return joules / 3.6e6;
}

double integrate_kwh(std::span<const PowerSample> samples, Timestamp from, Timestamp to,
                     GapPolicy policy) {
  const auto cover = coverage(samples, policy);
  return integrate_kwh(cover, from, to);
}

Seconds observed_seconds(std::span<const Coverage> cover, Timestamp from, Timestamp to) {
  Seconds total{0};
  for (const auto& c : cover) {
    const auto a = std::max(c.from, from);
    const auto b = std::min(c.to, to);
    if (b > a) total += b - a;
  }
  return total;
}

double mean_power_w(std::span<const Coverage> cover, Timestamp from, Timestamp to) {
  double joules = 0.0;
  std::int64_t seen = 0;
  for (const auto& c : cover) {
    const auto a = std::max(c.from, from);
    const auto b = std::min(c.to, to);
    if (b <= a) continue;
    joules += c.power_w * static_cast<double>((b - a).count());
    seen += (b - a).count();
  }
  return seen ? joules / static_cast<double>(seen) : 0.0;
}

std::map<std::string, std::vector<PowerSample>> group_by_channel(std::span<const PowerSample> samples) {
  std::map<std::string, std::vector<PowerSample>> out;
  for (const auto& s : samples) out[s.channel_id].push_back(s);
  return out;
}

}  // namespace hems
