#include "hems/advisor/generators.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "hems/analytics/savings.hpp"

namespace hems {
namespace {

Advice make_advice(const std::string& user_id, AdviceType type, const DeviceMetadata& d) {
  Advice a;
  a.advice_id = make_advice_id(user_id, type, d.device_id);
  a.user_id = user_id;
  a.type = type;
  a.device_type = d.device_type;
  a.device_id = d.device_id;
  a.params["device"] = d.device_type;
  return a;
}

std::string money2(double eur) { return fmt::format("{:.2f}", eur); }

}  // namespace

FleetStatistics FleetStatistics::compute(std::span<const DeviceProfile> devices) {
  struct Acc {
    double power = 0.0;
    std::size_t n = 0;
    double runs = 0.0;
    std::size_t driven = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& p : devices) {
    auto& a = acc[p.device.device_type];
    a.power += p.mean_power_w;
    ++a.n;
    if (p.device.user_driven) {
      a.runs += static_cast<double>(p.runs_month);
      ++a.driven;
    }
  }
  FleetStatistics fleet;
  for (const auto& [type, a] : acc) {
    TypeStatistics s;
    s.devices = a.n;
    s.mean_power_w = a.power / static_cast<double>(a.n);
    if (a.driven) s.mean_monthly_runs = a.runs / static_cast<double>(a.driven);
    fleet.types.emplace(type, s);
  }
  return fleet;
}

const TypeStatistics* FleetStatistics::find(const std::string& type) const {
  auto it = types.find(type);
  return it == types.end() ? nullptr : &it->second;
}

std::vector<Advice> generate_diagnostics(const std::string& user_id, std::span<const DeviceProfile> devices,
                                         const FleetStatistics& fleet, const AdvisorConfig& cfg,
                                         double unit_price_eur) {
  cfg.validate();
  std::vector<Advice> out;
  for (const auto& p : devices) {
    if (p.device.user_driven) continue;
    const auto* stats = fleet.find(p.device.device_type);
    if (!stats || stats->devices == 0 || !(stats->mean_power_w > 0.0)) continue;
    if (!(p.mean_power_w > (1.0 + cfg.tau1) * stats->mean_power_w)) continue;

    auto a = make_advice(user_id, AdviceType::diagnostics, p.device);
    const double kwh_year = (p.mean_power_w - stats->mean_power_w) * 8760.0 / 1000.0;
    a.saving_eur = kwh_year * unit_price_eur;
    a.params["device_w"] = fmt::format("{:.1f}", p.mean_power_w);
    a.params["type_w"] = fmt::format("{:.1f}", stats->mean_power_w);
    a.params["kwh_year"] = fmt::format("{:.1f}", kwh_year);
    a.params["saving_eur"] = money2(a.saving_eur);
    out.push_back(std::move(a));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Advice& x, const Advice& y) { return x.saving_eur > y.saving_eur; });
  return out;
}

std::vector<Advice> generate_shifting(const std::string& user_id, std::span<const DeviceProfile> devices,
                                      const TariffContext& ctx, std::string_view category,
                                      const AdvisorConfig& cfg) {
  const auto& scheme = ctx.scheme;
  const auto ci = scheme.category_index(category);
  std::size_t cheap = 0, dear = 0;
  for (std::size_t s = 1; s < scheme.slots().size(); ++s) {
    if (scheme.price(s, ci) < scheme.price(cheap, ci)) cheap = s;
    if (scheme.price(s, ci) > scheme.price(dear, ci)) dear = s;
  }
  std::vector<Advice> out;
  if (!(scheme.price(dear, ci) > scheme.price(cheap, ci))) return out;

  struct Ranked {
    double mean_event_kwh;
    double l;
    Advice advice;
  };
  std::vector<Ranked> ranked;
  for (const auto& p : devices) {
    if (!p.device.user_driven) continue;
    double l = 0.0;
    for (std::size_t s = 0; s < p.month_slot_kwh.size(); ++s) {
      if (s != cheap && scheme.price(s, ci) > scheme.price(cheap, ci)) l += p.month_slot_kwh[s];
    }
    const double saving = shift_savings(l, scheme.price(dear, ci), scheme.price(cheap, ci));
    if (!(saving > 0.0) || saving <= cfg.min_shift_saving_eur) continue;

    auto a = make_advice(user_id, AdviceType::shifting, p.device);
    a.saving_eur = saving;
    a.params["slot"] = scheme.slots()[cheap];
    a.params["l_kwh"] = fmt::format("{:.2f}", l);
    a.params["saving_eur"] = money2(saving);
    ranked.push_back({p.mean_event_kwh, l, std::move(a)});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& x, const Ranked& y) {
    if (x.mean_event_kwh != y.mean_event_kwh) return x.mean_event_kwh > y.mean_event_kwh;
    return x.l > y.l;
  });
  for (auto& r : ranked) out.push_back(std::move(r.advice));
  return out;
}

std::vector<Advice> generate_standby(const std::string& user_id, std::span<const DeviceProfile> devices,
                                     double unit_price_eur) {
  std::vector<Advice> out;
  for (const auto& p : devices) {
    if (!p.device.has_standby) continue;
    auto a = make_advice(user_id, AdviceType::standby, p.device);
    const double kwh_year = standby_annual_kwh(p.standby_power_w, StandbySchedule::always());
    a.saving_eur = kwh_year * unit_price_eur;
    a.params["standby_w"] = fmt::format("{:.2f}", p.standby_power_w);
    a.params["kwh_year"] = fmt::format("{:.1f}", kwh_year);
    a.params["saving_eur"] = money2(a.saving_eur);
    out.push_back(std::move(a));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Advice& x, const Advice& y) { return x.saving_eur > y.saving_eur; });
  return out;
}

std::vector<Advice> generate_curtailment(const std::string& user_id, std::span<const DeviceProfile> devices,
                                         const FleetStatistics& fleet) {
  struct Ranked {
    double deviation;
    double cost;
    Advice advice;
  };
  std::vector<Ranked> ranked;
  for (const auto& p : devices) {
    if (!p.device.user_driven || p.runs_month == 0) continue;
    const auto* stats = fleet.find(p.device.device_type);
    if (!stats || !stats->mean_monthly_runs) continue;
    const double runs = static_cast<double>(p.runs_month);
    const double deviation = runs - *stats->mean_monthly_runs;
    if (!(deviation > 0.0)) continue;

    auto a = make_advice(user_id, AdviceType::curtailment, p.device);
    a.saving_eur = p.month_cost_eur * (deviation / runs) * 12.0;
    a.params["runs"] = std::to_string(p.runs_month);
    a.params["type_runs"] = fmt::format("{:.1f}", *stats->mean_monthly_runs);
    a.params["saving_eur"] = money2(a.saving_eur);
    ranked.push_back({deviation, p.month_cost_eur, std::move(a)});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& x, const Ranked& y) {
    if (x.deviation != y.deviation) return x.deviation > y.deviation;
    return x.cost > y.cost;
  });
  std::vector<Advice> out;
  for (auto& r : ranked) out.push_back(std::move(r.advice));
  return out;
}

}  // namespace hems
