#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hems/advisor/advice.hpp"
#include "hems/core/types.hpp"
#include "hems/tariff/pricing.hpp"

namespace hems {

/// What the generators need to know about one device.
struct DeviceProfile {
  DeviceMetadata device;
  double mean_power_w = 0.0;     // trailing 30-day mean over observed time
  double standby_power_w = 0.0;
  std::size_t runs_month = 0;    // events started this month
  double month_cost_eur = 0.0;
  double month_kwh = 0.0;
  double mean_event_kwh = 0.0;
  std::vector<double> month_slot_kwh;  // indexed like the scheme's slots
};

struct TypeStatistics {
  double mean_power_w = 0.0;
  std::size_t devices = 0;
  std::optional<double> mean_monthly_runs;  // over user-driven devices of the type
};

/// Cross-household per-type averages, recomputed periodically and cached.
struct FleetStatistics {
  std::map<std::string, TypeStatistics> types;

  static FleetStatistics compute(std::span<const DeviceProfile> devices);
  const TypeStatistics* find(const std::string& type) const;
};

/// Non-user-driven devices whose mean power exceeds (1 + tau1) times their
/// type mean. Types without a population mean are skipped.
std::vector<Advice> generate_diagnostics(const std::string& user_id, std::span<const DeviceProfile> devices,
                                         const FleetStatistics& fleet, const AdvisorConfig& cfg,
                                         double unit_price_eur);

/// User-driven devices, ranked by mean event energy, with s = l*t - l*c
/// where l is this month's energy outside the cheapest slot. Empty when the
/// category has a single price.
std::vector<Advice> generate_shifting(const std::string& user_id, std::span<const DeviceProfile> devices,
                                      const TariffContext& ctx, std::string_view category,
                                      const AdvisorConfig& cfg);

/// One advice per standby-capable device with its always-on annual waste.
std::vector<Advice> generate_standby(const std::string& user_id, std::span<const DeviceProfile> devices,
                                     double unit_price_eur);

/// User-driven devices used more often than their type average, ranked by
/// (excess runs, month cost). Yearly saving = month cost * excess/runs * 12.
std::vector<Advice> generate_curtailment(const std::string& user_id, std::span<const DeviceProfile> devices,
                                         const FleetStatistics& fleet);

}  // namespace hems
