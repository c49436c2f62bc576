#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "hems/tariff/scheme.hpp"

namespace hems {

/// When a standby-capable device stays powered.
struct StandbySchedule {
  bool always_on = true;
  double weekday_hours = 24.0;      // per weekday
  double weekend_day_hours = 24.0;  // per Saturday/Sunday

  static StandbySchedule always() { return {}; }
  static StandbySchedule weekly(double weekday_h, double weekend_day_h) { return {false, weekday_h, weekend_day_h}; }
  /// 8760 when always on, else hours over 52 weeks.
  double hours_per_year() const;
};

double standby_annual_kwh(double standby_power_w, const StandbySchedule& schedule);

struct ApplianceRates {
  std::string device_id;
  double active_rate_wh_per_h = 0.0;  // energy per hour of activity
  double standby_power_w = 0.0;
};

struct ApplianceUse {
  ApplianceRates rates;
  double energy_kwh = 0.0;
};

struct SwapEstimate {
  double hours_a = 0.0;
  double hours_b = 0.0;
  double savings_fraction = 0.0;
};

/// Hours of activity from energy / rate, then the consumption change when the
/// two devices trade usage hours: 1 - (ha*rb + hb*ra) / (ha*ra + hb*rb).
SwapEstimate swap_savings(const ApplianceUse& a, const ApplianceUse& b);

/// EU refrigeration label coefficients: SAE = M * Veq + N.
struct LabelCoefficients {
  int category = 0;
  double m = 0.0;
  double n = 0.0;
  double design_temp_c = -18.0;
};

class LabelModel {
 public:
  static LabelModel parse(std::string_view text);
  static LabelModel load(const std::filesystem::path& path);

  const LabelCoefficients& coefficients(int category) const;
  /// AE = EEI/100 * (M * V * (25 - Tc) / 20 + N), kWh/year.
  double annual_kwh(double eei, double volume_l, int category) const;

 private:
  std::map<int, LabelCoefficients> table_;
};

/// Replacement target: an explicit annual figure or a labelled model.
struct ReplacementTarget {
  std::optional<double> annual_kwh;
  double eei = 0.0;
  double volume_l = 0.0;
  int category = 0;
  int count = 1;
};

struct ReplacementEstimate {
  double old_kwh_year = 0.0;
  double old_kwh_month = 0.0;
  double new_kwh_year = 0.0;
  double monthly_saving_kwh = 0.0;
};

/// Old annual = sum(power) * 8760 h; monthly figures are annual / 12.
/// NotFoundError for a label category missing from `labels`.
ReplacementEstimate replacement_annual_kwh(std::span<const double> old_measured_w, const ReplacementTarget& target,
                                           const LabelModel* labels = nullptr);

/// s = l*t - l*c with t, c the expensive and cheap unit prices.
double shift_savings(double l_kwh, double expensive_price, double cheap_price);
double shift_savings(double l_kwh, std::string_view expensive_slot, std::string_view cheap_slot,
                     std::string_view category, const TariffScheme& scheme);

}  // namespace hems
