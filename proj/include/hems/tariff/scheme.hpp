#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hems {

/// A weekly interval assigned to one slot, in local wall-clock minutes.
struct SlotRule {
  std::string slot_id;
  std::array<bool, 7> weekdays{};  // indexed by weekday::c_encoding() (Sunday = 0)
  int from_minute = 0;             // inclusive
  int to_minute = 1440;            // exclusive
  bool exclude_holidays = true;
};

/// Consumption band in kWh/year with inclusive integer bounds as tabled.
struct ConsumptionCategory {
  std::string id;
  std::optional<double> lower_kwh;
  std::optional<double> upper_kwh;
};

/// Time-of-use scheme: slot calendar, consumption categories, unit prices.
///
/// File format (line oriented, '#' comments):
///
///     name = it-residential-two-slot
///     default_slot = T2
///     [slots]
///     T1  Mon-Fri  08:00  19:00  exclude
///     [categories]
///     C1  -     1800
///     C2  1801  2640
///     [prices]
///     T1  C1  0.127512
///
/// Validated on load: rules do not overlap, every instant maps to exactly one
/// slot, bounds are contiguous, every (slot, category) pair is priced and
/// prices do not decrease with the category.
class TariffScheme {
 public:
  static TariffScheme parse(std::string_view text);
  static TariffScheme load(const std::filesystem::path& path);

  const std::string& name() const { return name_; }
  const std::string& currency() const { return currency_; }
  const std::string& default_slot() const { return default_slot_; }
  const std::vector<std::string>& slots() const { return slots_; }
  const std::vector<SlotRule>& rules() const { return rules_; }
  const std::vector<ConsumptionCategory>& categories() const { return categories_; }

  /// Index into slots() for a local wall-clock position.
  std::size_t slot_index(unsigned weekday_c, int minute_of_day, bool holiday) const;
  std::size_t slot_index(std::string_view slot_id) const;
  std::size_t category_index(std::string_view category_id) const;

  /// EUR/kWh; NotFoundError on an unknown pair.
  double price(std::string_view slot_id, std::string_view category_id) const;
  double price(std::size_t slot, std::size_t category) const { return prices_[slot][category]; }

  /// Sorted minutes-of-day at which a rule starts or ends (always includes 0).
  const std::vector<int>& edges() const { return edges_; }

 private:
  void validate();

  std::string name_;
  std::string currency_ = "EUR";
  std::string default_slot_;
  std::vector<std::string> slots_;
  std::vector<SlotRule> rules_;
  std::vector<ConsumptionCategory> categories_;
  std::vector<std::vector<double>> prices_;  // [slot][category]
  std::vector<int> edges_;
  // Slot per (weekday, minute) for working days and holidays.
  std::vector<std::uint8_t> table_workday_;
  std::vector<std::uint8_t> table_holiday_;
};

}  // namespace hems
