#include "hems/analytics/reports.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "hems/error.hpp"

namespace hems {

using namespace std::chrono;

PeriodKind parse_period_kind(std::string_view s) {
  if (s == "day") return PeriodKind::day;
  if (s == "week") return PeriodKind::week;
  if (s == "month") return PeriodKind::month;
  if (s == "year") return PeriodKind::year;
  throw ValidationError(fmt::format("unknown period '{}' (day|week|month|year)", s));
}

Period month_period(Date first_day, const Timezone& tz) {
  const year_month_day ymd{first_day};
  const Date next{sys_days{(ymd.year() / ymd.month() / 1) + months{1}}};
  return {tz.start_of_day(Date{sys_days{ymd.year() / ymd.month() / 1}}), tz.start_of_day(next)};
}

Period period_containing(Timestamp now, PeriodKind kind, const Timezone& tz) {
  const Date today = tz.local_date(now);
  const year_month_day ymd{today};
  switch (kind) {
    case PeriodKind::day:
      return {tz.start_of_day(today), tz.start_of_day(today + days{1})};
    case PeriodKind::week: {
      const auto back = (weekday{today}.c_encoding() + 6) % 7;
      const Date monday = today - days{back};
      return {tz.start_of_day(monday), tz.start_of_day(monday + days{7})};
    }
    case PeriodKind::month:
      return month_period(sys_days{ymd.year() / ymd.month() / 1}, tz);
    case PeriodKind::year:
      return {tz.start_of_day(sys_days{ymd.year() / January / 1}),
              tz.start_of_day(sys_days{(ymd.year() + years{1}) / January / 1})};
  }
  throw ValidationError("unknown period kind");
}

std::vector<ItemizationEntry> itemize(std::span<const UsageEvent> events, Period period) {
  std::map<std::string, ItemizationEntry> by_device;
  double total = 0.0;
  for (const auto& e : events) {
    if (!period.contains(e.t_start)) continue;
    if (!e.cost_eur) throw ValidationError(fmt::format("event {} has not been priced", e.key()));
    auto& entry = by_device[e.device_id];
    entry.device_id = e.device_id;
    entry.energy_kwh += e.energy_kwh;
    entry.cost_eur += *e.cost_eur;
    total += e.energy_kwh;
  }
  std::vector<ItemizationEntry> out;
  out.reserve(by_device.size());
  for (auto& [id, entry] : by_device) {
    entry.share = total > 0.0 ? entry.energy_kwh / total : 0.0;
    out.push_back(std::move(entry));
  }
  return out;
}

SlotDistribution slot_distribution(std::span<const UsageEvent> events, const TariffContext& ctx) {
  SlotDistribution d;
  d.slots = ctx.scheme.slots();
  std::map<std::string, std::vector<double>> energy;
  for (const auto& e : events) {
    auto per_slot = event_slot_energy(e, ctx);
    auto& row = energy[e.device_id];
    row.resize(d.slots.size(), 0.0);
    for (std::size_t s = 0; s < per_slot.size(); ++s) row[s] += per_slot[s];
  }
  std::vector<double> column(d.slots.size(), 0.0);
  for (const auto& [id, row] : energy) {
    d.devices.push_back(id);
    d.energy_kwh.push_back(row);
    for (std::size_t s = 0; s < row.size(); ++s) column[s] += row[s];
  }
  for (const auto& row : d.energy_kwh) {
    std::vector<double> pct(row.size(), 0.0);
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (column[s] > 0.0) pct[s] = 100.0 * row[s] / column[s];
    }
    d.percent.push_back(std::move(pct));
  }
  return d;
}

UsageModel build_usage_model(std::span<const UsageEvent> events, const DeviceMetadata& device, Period window,
                             const Timezone& tz) {
  if (!device.user_driven) {
    throw ValidationError(fmt::format("device '{}' is not user-driven", device.device_id));
  }
  if (window.to <= window.from) throw ValidationError("usage window must be non-empty");
  UsageModel model;
  model.device_id = device.device_id;
  double energy = 0.0;
  for (const auto& e : events) {
    if (e.device_id != device.device_id || !window.contains(e.t_start)) continue;
    const auto local = tz.to_local(e.t_start);
    const auto hour = duration_cast<hours>(local - floor<days>(local)).count();
    ++model.start_hour_histogram[static_cast<std::size_t>(hour)];
    ++model.event_count;
    energy += e.energy_kwh;
  }
  const double weeks = static_cast<double>(window.length().count()) / (7.0 * 86400.0);
  model.events_per_week = static_cast<double>(model.event_count) / weeks;
  model.mean_event_kwh = model.event_count ? energy / static_cast<double>(model.event_count) : 0.0;
  return model;
}

}  // namespace hems
