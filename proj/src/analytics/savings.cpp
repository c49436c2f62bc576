#include "hems/analytics/savings.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "hems/error.hpp"
#include "hems/text.hpp"

namespace hems {

double StandbySchedule::hours_per_year() const {
  if (always_on) return 8760.0;
  return (5.0 * weekday_hours + 2.0 * weekend_day_hours) * 52.0;
}

double standby_annual_kwh(double standby_power_w, const StandbySchedule& schedule) {
  if (!(standby_power_w >= 0.0)) throw ValidationError("standby power must not be negative");
  if (!schedule.always_on &&
      (schedule.weekday_hours < 0 || schedule.weekday_hours > 24 || schedule.weekend_day_hours < 0 ||
       schedule.weekend_day_hours > 24)) {
    throw ValidationError("daily standby hours must lie in [0, 24]");
  }
  return standby_power_w * schedule.hours_per_year() / 1000.0;
}

SwapEstimate swap_savings(const ApplianceUse& a, const ApplianceUse& b) {
  const double ra = a.rates.active_rate_wh_per_h;
  const double rb = b.rates.active_rate_wh_per_h;
  if (!(ra > 0.0) || !(rb > 0.0)) throw ValidationError("activity rates must be positive");
  if (a.energy_kwh < 0.0 || b.energy_kwh < 0.0) throw ValidationError("energy must not be negative");

  SwapEstimate est;
  est.hours_a = a.energy_kwh * 1000.0 / ra;
  est.hours_b = b.energy_kwh * 1000.0 / rb;
  const double current = est.hours_a * ra + est.hours_b * rb;
  const double swapped = est.hours_a * rb + est.hours_b * ra;
  est.savings_fraction = current > 0.0 ? 1.0 - swapped / current : 0.0;
  return est;
}

LabelModel LabelModel::parse(std::string_view text) {
  LabelModel model;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    line = strip_comment(line);
    if (line.empty()) continue;
    auto f = split_ws(line);
    double cat = 0, m = 0, n = 0, tc = 0;
    if (f.size() < 4 || !parse_double(f[0], cat) || !parse_double(f[1], m) || !parse_double(f[2], n) ||
        !parse_double(f[3], tc) || cat != std::floor(cat)) {
      throw ParseError(fmt::format("label file line {}: expected 'category M N Tc'", line_no));
    }
    const int c = static_cast<int>(cat);
    model.table_[c] = {c, m, n, tc};
  }
  return model;
}

LabelModel LabelModel::load(const std::filesystem::path& path) { return parse(read_file(path)); }

const LabelCoefficients& LabelModel::coefficients(int category) const {
  auto it = table_.find(category);
  if (it == table_.end()) throw NotFoundError(fmt::format("unknown label category {}", category));
  return it->second;
}

double LabelModel::annual_kwh(double eei, double volume_l, int category) const {
  const auto& c = coefficients(category);
  if (eei < 0.0 || volume_l < 0.0) throw ValidationError("EEI and volume must not be negative");
  const double veq = volume_l * (25.0 - c.design_temp_c) / 20.0;
  return eei / 100.0 * (c.m * veq + c.n);
}

ReplacementEstimate replacement_annual_kwh(std::span<const double> old_measured_w, const ReplacementTarget& target,
                                           const LabelModel* labels) {
  for (double w : old_measured_w) {
    if (!(w >= 0.0)) throw ValidationError("measured power must not be negative");
  }
  ReplacementEstimate est;
  est.old_kwh_year = std::accumulate(old_measured_w.begin(), old_measured_w.end(), 0.0) * 8760.0 / 1000.0;
  est.old_kwh_month = est.old_kwh_year / 12.0;
  if (target.annual_kwh) {
    if (*target.annual_kwh < 0.0) throw ValidationError("target consumption must not be negative");
    est.new_kwh_year = *target.annual_kwh;
  } else {
    if (!labels) throw ValidationError("label coefficients are required for a labelled target");
    if (target.count < 0) throw ValidationError("replacement count must not be negative");
    est.new_kwh_year = target.count * labels->annual_kwh(target.eei, target.volume_l, target.category);
  }
  est.monthly_saving_kwh = (est.old_kwh_year - est.new_kwh_year) / 12.0;
  return est;
}

double shift_savings(double l_kwh, double expensive_price, double cheap_price) {
  if (!(l_kwh >= 0.0)) throw ValidationError("shifted load must not be negative");
  return l_kwh * expensive_price - l_kwh * cheap_price;
}

double shift_savings(double l_kwh, std::string_view expensive_slot, std::string_view cheap_slot,
                     std::string_view category, const TariffScheme& scheme) {
  return shift_savings(l_kwh, scheme.price(expensive_slot, category), scheme.price(cheap_slot, category));
}

}  // namespace hems
