#pragma once

#include <filesystem>
#include <set>
#include <string_view>

#include "hems/time.hpp"

namespace hems {

/// Public holidays as local calendar dates. File: one ISO date per line, '#' comments.
class HolidayCalendar {
 public:
  HolidayCalendar() = default;
  static HolidayCalendar parse(std::string_view text);
  static HolidayCalendar load(const std::filesystem::path& path);

  void add(Date d) { days_.insert(d); }
  bool contains(Date d) const { return days_.count(d) > 0; }
  std::size_t size() const { return days_.size(); }

 private:
  std::set<Date> days_;
};

}  // namespace hems
