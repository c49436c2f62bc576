#include "hems/tariff/holidays.hpp"

#include <fmt/format.h>

#include "hems/error.hpp"
#include "hems/text.hpp"

namespace hems {

HolidayCalendar HolidayCalendar::parse(std::string_view text) {
  HolidayCalendar cal;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    line = strip_comment(line);
    if (line.empty()) continue;
    try {
      cal.add(parse_date(line));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("holiday file line {}: {}", line_no, e.what()));
    }
  }
  return cal;
}

HolidayCalendar HolidayCalendar::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

}  // namespace hems
