#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hems/core/types.hpp"
#include "hems/tariff/pricing.hpp"

namespace hems {

/// Half-open [from, to).
struct Period {
  Timestamp from;
  Timestamp to;

  bool contains(Timestamp t) const { return t >= from && t < to; }
  Seconds length() const { return to - from; }
};

enum class PeriodKind { day, week, month, year };
PeriodKind parse_period_kind(std::string_view s);

/// Local calendar day / ISO week (Monday start) / month / year holding `now`.
Period period_containing(Timestamp now, PeriodKind kind, const Timezone& tz);
/// The local calendar month starting at `first_day`.
Period month_period(Date first_day, const Timezone& tz);

struct ItemizationEntry {
  std::string device_id;
  double energy_kwh = 0.0;
  double cost_eur = 0.0;
  double share = 0.0;  // of the monitored total
};

/// Per-device sums of priced events starting inside `period`, ordered by
/// device id. Shares are 0 when the total is 0. Unpriced events throw.
std::vector<ItemizationEntry> itemize(std::span<const UsageEvent> events, Period period);

/// Energy per (device, slot); percentages normalized per slot column so each
/// column sums to 100 across devices (all-zero columns stay zero).
struct SlotDistribution {
  std::vector<std::string> slots;
  std::vector<std::string> devices;
  std::vector<std::vector<double>> energy_kwh;  // [device][slot]
  std::vector<std::vector<double>> percent;     // [device][slot]
};
SlotDistribution slot_distribution(std::span<const UsageEvent> events, const TariffContext& ctx);

struct UsageModel {
  std::string device_id;
  double events_per_week = 0.0;
  std::array<std::size_t, 24> start_hour_histogram{};  // local hour of t_start
  double mean_event_kwh = 0.0;
  std::size_t event_count = 0;
};

/// Usage model of a user-driven device from its events inside `window`.
/// ValidationError for devices that run autonomously.
UsageModel build_usage_model(std::span<const UsageEvent> events, const DeviceMetadata& device, Period window,
                             const Timezone& tz);

}  // namespace hems
