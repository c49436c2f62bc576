#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hems {

using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;
using Date = std::chrono::sys_days;

inline Timestamp from_unix(std::int64_t s) { return Timestamp{Seconds{s}}; }
inline std::int64_t to_unix(Timestamp t) { return t.time_since_epoch().count(); }

/// "2014-09-01T12:00:00Z". Accepts a trailing "Z", "+hh:mm"/"-hh:mm" offset,
/// optional fractional seconds (truncated), or a bare unix epoch integer.
Timestamp parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp t);

/// "2014-09-01"
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// "2014-09" -> first day of that month.
Date parse_month(std::string_view text);

/// UTC offset rules for a household. Backed by a POSIX TZ rule
/// ("CET-1CEST,M3.5.0,M10.5.0/3"); a few IANA names are mapped to their rule.
class Timezone {
 public:
  Timezone();  // UTC

  static Timezone utc() { return Timezone{}; }
  static Timezone from_name(std::string_view name);

  const std::string& name() const { return name_; }

  Seconds offset_at(Timestamp utc) const;
  std::chrono::local_seconds to_local(Timestamp utc) const;
  /// Local wall time to UTC. Wall times inside a DST gap resolve with the
  /// pre-transition offset; ambiguous ones pick the earlier instant.
  Timestamp from_local(std::chrono::local_seconds local) const;

  /// First offset change strictly after t, or Timestamp::max() when none.
  Timestamp next_transition(Timestamp t) const;

  Date local_date(Timestamp utc) const;
  /// UTC instant of local midnight starting the given local date.
  Timestamp start_of_day(Date local_day) const;

 private:
  struct Transition {
    std::int64_t at;  // unix seconds
    std::int64_t offset_after;
  };

  std::string name_;
  std::int64_t base_offset_ = 0;
  std::vector<Transition> transitions_;
};

}  // namespace hems
