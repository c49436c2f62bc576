#pragma once

#include <span>
#include <string>
#include <vector>

#include "hems/core/types.hpp"
#include "hems/tariff/holidays.hpp"
#include "hems/tariff/scheme.hpp"

namespace hems {

/// Immutable bundle needed to place instants into slots.
struct TariffContext {
  TariffScheme scheme;
  HolidayCalendar holidays;
  Timezone timezone;
};

/// Exactly one slot per instant: local weekday, minute of day, holiday flag.
const std::string& classify_slot(Timestamp t, const TariffContext& ctx);
std::size_t classify_slot_index(Timestamp t, const TariffContext& ctx);

/// Maximal runs of constant slot covering [from, to).
struct SlotRun {
  std::size_t slot;
  Timestamp from;
  Timestamp to;
};
std::vector<SlotRun> slot_runs(Timestamp from, Timestamp to, const TariffContext& ctx);

/// Category whose inclusive bounds hold annual_kwh; values between two
/// integer bounds (1800 < x < 1801) go to the higher band.
/// ValidationError on negative input.
const std::string& determine_category(double annual_kwh, const TariffScheme& scheme);

double price_per_kwh(std::string_view slot, std::string_view category, const TariffScheme& scheme);
double cost_of_energy(double kwh, std::string_view slot, std::string_view category,
                      const TariffScheme& scheme);

/// Energy spread uniformly over the event's span, each part priced by its slot.
double cost_of_event(const UsageEvent& event, const TariffContext& ctx, std::string_view category);
/// kWh per slot (indexed like scheme.slots()) under the same uniform split.
std::vector<double> event_slot_energy(const UsageEvent& event, const TariffContext& ctx);

enum class CategoryMethod { measured_365d, annualized_projection, manual };
std::string_view to_string(CategoryMethod m);

struct CategoryAssignment {
  std::string household_id;
  std::string category_id;
  double basis_kwh_year = 0.0;
  CategoryMethod method = CategoryMethod::manual;
};

/// daily_kwh: one total per observed day, oldest first. With at least 365
/// days the trailing 365 are summed; otherwise the mean is annualized.
CategoryAssignment assign_category(const std::string& household_id, std::span<const double> daily_kwh,
                                   const TariffScheme& scheme);
/// Manual override; basis is the midpoint of the band (its finite bound when open).
CategoryAssignment assign_category_manual(const std::string& household_id, const std::string& category,
                                          const TariffScheme& scheme);

/// Price averaged over one reference week by slot hours (holidays ignored).
double time_weighted_price(const TariffContext& ctx, std::string_view category);

}  // namespace hems
