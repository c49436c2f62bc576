#include "hems/tariff/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "hems/error.hpp"

namespace hems {
namespace {

using namespace std::chrono;

struct LocalPosition {
  unsigned weekday;
  std::int64_t second_of_day;
  bool holiday;
};

LocalPosition locate(Timestamp t, const TariffContext& ctx) {
  const auto local = ctx.timezone.to_local(t);
  const auto day = floor<days>(local);
  const Date date{day.time_since_epoch()};
  return {weekday{date}.c_encoding(), (local - day).count(), ctx.holidays.contains(date)};
}

}  // namespace

std::size_t classify_slot_index(Timestamp t, const TariffContext& ctx) {
  const auto p = locate(t, ctx);
  return ctx.scheme.slot_index(p.weekday, static_cast<int>(p.second_of_day / 60), p.holiday);
}

const std::string& classify_slot(Timestamp t, const TariffContext& ctx) {
  return ctx.scheme.slots()[classify_slot_index(t, ctx)];
}

std::vector<SlotRun> slot_runs(Timestamp from, Timestamp to, const TariffContext& ctx) {
  std::vector<SlotRun> runs;
  const auto& edges = ctx.scheme.edges();
  Timestamp cur = from;
  while (cur < to) {
    const auto p = locate(cur, ctx);
    const auto slot = ctx.scheme.slot_index(p.weekday, static_cast<int>(p.second_of_day / 60), p.holiday);
    // Next rule edge today, else local midnight.
    std::int64_t next_sod = 86400;
    auto it = std::upper_bound(edges.begin(), edges.end(), static_cast<int>(p.second_of_day / 60));
    if (it != edges.end()) next_sod = static_cast<std::int64_t>(*it) * 60;
    Timestamp next = cur + Seconds{next_sod - p.second_of_day};
    next = std::min({next, ctx.timezone.next_transition(cur), to});
    if (!runs.empty() && runs.back().slot == slot && runs.back().to == cur) {
      runs.back().to = next;
    } else {
      runs.push_back({slot, cur, next});
    }
    cur = next;
  }
  return runs;
}

const std::string& determine_category(double annual_kwh, const TariffScheme& scheme) {
  if (!(annual_kwh >= 0.0)) throw ValidationError("annual consumption must not be negative");
  for (const auto& c : scheme.categories()) {
    if (!c.upper_kwh || annual_kwh <= *c.upper_kwh) return c.id;
  }
  return scheme.categories().back().id;
}

double price_per_kwh(std::string_view slot, std::string_view category, const TariffScheme& scheme) {
  return scheme.price(slot, category);
}

double cost_of_energy(double kwh, std::string_view slot, std::string_view category, const TariffScheme& scheme) {
  if (!(kwh >= 0.0)) throw ValidationError("energy must not be negative");
  return kwh * price_per_kwh(slot, category, scheme);
}

std::vector<double> event_slot_energy(const UsageEvent& event, const TariffContext& ctx) {
  if (event.duration <= Seconds{0}) throw ValidationError("event duration must be positive");
  std::vector<double> out(ctx.scheme.slots().size(), 0.0);
  const double total = static_cast<double>(event.duration.count());
  for (const auto& run : slot_runs(event.t_start, event.t_end(), ctx)) {
    out[run.slot] += event.energy_kwh * static_cast<double>((run.to - run.from).count()) / total;
  }
  return out;
}

double cost_of_event(const UsageEvent& event, const TariffContext& ctx, std::string_view category) {
  if (!(event.energy_kwh > 0.0)) throw ValidationError("event energy must be positive");
  const auto ci = ctx.scheme.category_index(category);
  const auto per_slot = event_slot_energy(event, ctx);
  double cost = 0.0;
  for (std::size_t s = 0; s < per_slot.size(); ++s) cost += per_slot[s] * ctx.scheme.price(s, ci);
  return cost;
}

std::string_view to_string(CategoryMethod m) {
  switch (m) {
    case CategoryMethod::measured_365d: return "measured_365d";
    case CategoryMethod::annualized_projection: return "annualized_projection";
    case CategoryMethod::manual: return "manual";
  }
  return "manual";
}

CategoryAssignment assign_category(const std::string& household_id, std::span<const double> daily_kwh,
                                   const TariffScheme& scheme) {
  if (daily_kwh.empty()) throw ValidationError("no consumption history to assign a category");
  CategoryAssignment a;
  a.household_id = household_id;
  if (daily_kwh.size() >= 365) {
    auto tail = daily_kwh.subspan(daily_kwh.size() - 365);
    a.basis_kwh_year = std::accumulate(tail.begin(), tail.end(), 0.0);
    a.method = CategoryMethod::measured_365d;
  } else {
    const double total = std::accumulate(daily_kwh.begin(), daily_kwh.end(), 0.0);
    a.basis_kwh_year = total * 365.0 / static_cast<double>(daily_kwh.size());
    a.method = CategoryMethod::annualized_projection;
  }
  a.category_id = determine_category(a.basis_kwh_year, scheme);
  return a;
}

CategoryAssignment assign_category_manual(const std::string& household_id, const std::string& category,
                                          const TariffScheme& scheme) {
  const auto& c = scheme.categories()[scheme.category_index(category)];
  const double lo = c.lower_kwh.value_or(0.0);
  return {household_id, category, c.upper_kwh ? (lo + *c.upper_kwh) / 2.0 : lo, CategoryMethod::manual};
}

double time_weighted_price(const TariffContext& ctx, std::string_view category) {
  const auto ci = ctx.scheme.category_index(category);
  double sum = 0.0;
  for (unsigned d = 0; d < 7; ++d) {
    for (int m = 0; m < 1440; ++m) sum += ctx.scheme.price(ctx.scheme.slot_index(d, m, false), ci);
  }
  return sum / (7.0 * 1440.0);
}

}  // namespace hems
