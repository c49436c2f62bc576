#include "hems/time.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <utility>

#include <boost/date_time/local_time/local_time.hpp>
#include <fmt/format.h>

#include "hems/error.hpp"

namespace hems {
namespace {

using namespace std::chrono;

int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  if (pos + len > text.size()) throw ParseError(fmt::format("truncated timestamp '{}'", whole));
  int value = 0;
  auto first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw ParseError(fmt::format("malformed timestamp '{}'", whole));
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view whole) {
  if (pos >= text.size() || text[pos] != c) {
    throw ParseError(fmt::format("malformed timestamp '{}'", whole));
  }
}

Date checked_date(int y, int m, int d, std::string_view whole) {
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw ParseError(fmt::format("invalid calendar date '{}'", whole));
  return sys_days{ymd};
}

// IANA names mapped to rules in Boost's sign convention (east of Greenwich positive).
constexpr std::array<std::pair<std::string_view, std::string_view>, 12> kAliases{{
    {"Europe/Rome", "CET+1CEST,M3.5.0,M10.5.0/3"},
    {"Europe/Vienna", "CET+1CEST,M3.5.0,M10.5.0/3"},
    {"Europe/Berlin", "CET+1CEST,M3.5.0,M10.5.0/3"},
    {"Europe/Paris", "CET+1CEST,M3.5.0,M10.5.0/3"},
    {"Europe/Madrid", "CET+1CEST,M3.5.0,M10.5.0/3"},
    {"Europe/Zurich", "CET+1CEST,M3.5.0,M10.5.0/3"},
    {"Europe/Ljubljana", "CET+1CEST,M3.5.0,M10.5.0/3"},
    {"Europe/London", "GMT+0BST,M3.5.0/1,M10.5.0"},
    {"Europe/Lisbon", "WET+0WEST,M3.5.0/1,M10.5.0"},
    {"Europe/Athens", "EET+2EEST,M3.5.0/3,M10.5.0/4"},
    {"America/New_York", "EST-5EDT,M3.2.0,M11.1.0"},
    {"Etc/UTC", "UTC+0"},
}};

std::int64_t to_unix_seconds(const boost::posix_time::ptime& pt) {
  static const boost::posix_time::ptime epoch(boost::gregorian::date(1970, 1, 1));
  return (pt - epoch).total_seconds();
}

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '"')) text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty timestamp");

  if (text.find('-', 1) == std::string_view::npos) {
    std::int64_t epoch = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), epoch);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ParseError(fmt::format("malformed timestamp '{}'", text));
    }
    return from_unix(epoch);
  }

  const int y = parse_int(text, 0, 4, text);
  expect_char(text, 4, '-', text);
  const int mo = parse_int(text, 5, 2, text);
  expect_char(text, 7, '-', text);
  const int d = parse_int(text, 8, 2, text);
  if (text.size() < 11 || (text[10] != 'T' && text[10] != ' ')) {
    throw ParseError(fmt::format("timestamp '{}' lacks a time part", text));
  }
  const int h = parse_int(text, 11, 2, text);
  expect_char(text, 13, ':', text);
  const int mi = parse_int(text, 14, 2, text);
  int s = 0;
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    s = parse_int(text, 17, 2, text);
    pos = 19;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  }
  if (h > 23 || mi > 59 || s > 60) throw ParseError(fmt::format("invalid time of day '{}'", text));

  std::int64_t offset = 0;
  if (pos == text.size()) {
    throw ParseError(fmt::format("timestamp '{}' lacks a UTC designator", text));
  }
  if (text[pos] == 'Z') {
    if (pos + 1 != text.size()) throw ParseError(fmt::format("malformed timestamp '{}'", text));
  } else if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '+' ? 1 : -1;
    const int oh = parse_int(text, pos + 1, 2, text);
    expect_char(text, pos + 3, ':', text);
    const int om = parse_int(text, pos + 4, 2, text);
    if (pos + 6 != text.size()) throw ParseError(fmt::format("malformed timestamp '{}'", text));
    offset = sign * (oh * 3600 + om * 60);
  } else {
    throw ParseError(fmt::format("malformed timestamp '{}'", text));
  }

  const Date date = checked_date(y, mo, d, text);
  return Timestamp{date} + hours{h} + minutes{mi} + Seconds{s} - Seconds{offset};
}

std::string format_iso8601(Timestamp t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

Date parse_date(std::string_view text) {
  if (text.size() != 10) throw ParseError(fmt::format("malformed date '{}'", text));
  const int y = parse_int(text, 0, 4, text);
  expect_char(text, 4, '-', text);
  const int m = parse_int(text, 5, 2, text);
  expect_char(text, 7, '-', text);
  const int d = parse_int(text, 8, 2, text);
  return checked_date(y, m, d, text);
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

Date parse_month(std::string_view text) {
  if (text.size() != 7) throw ParseError(fmt::format("malformed month '{}'", text));
  const int y = parse_int(text, 0, 4, text);
  expect_char(text, 4, '-', text);
  const int m = parse_int(text, 5, 2, text);
  return checked_date(y, m, 1, text);
}

Timezone::Timezone() : name_("UTC") {}

Timezone Timezone::from_name(std::string_view name) {
  if (name.empty() || name == "UTC" || name == "Z" || name == "GMT") return Timezone{};

  std::string rule{name};
  for (const auto& [alias, posix] : kAliases) {
    if (alias == name) rule = posix;
  }

  Timezone tz;
  tz.name_ = std::string{name};
  try {
    boost::local_time::posix_time_zone zone(rule);
    tz.base_offset_ = zone.base_utc_offset().total_seconds();
    if (zone.has_dst()) {
      const std::int64_t dst = zone.dst_offset().total_seconds();
      for (int y = 1970; y <= 2100; ++y) {
        const auto start = to_unix_seconds(zone.dst_local_start_time(y)) - tz.base_offset_;
        const auto end = to_unix_seconds(zone.dst_local_end_time(y)) - tz.base_offset_ - dst;
        tz.transitions_.push_back({start, tz.base_offset_ + dst});
        tz.transitions_.push_back({end, tz.base_offset_});
      }
      std::sort(tz.transitions_.begin(), tz.transitions_.end(),
                [](const Transition& a, const Transition& b) { return a.at < b.at; });
    }
  } catch (const std::exception& e) {
    throw ValidationError(fmt::format("unknown timezone '{}': {}", name, e.what()));
  }
  return tz;
}

Seconds Timezone::offset_at(Timestamp utc) const {
  const auto t = to_unix(utc);
  auto it = std::upper_bound(transitions_.begin(), transitions_.end(), t,
                             [](std::int64_t v, const Transition& tr) { return v < tr.at; });
  if (it == transitions_.begin()) return Seconds{base_offset_};
  return Seconds{std::prev(it)->offset_after};
}

std::chrono::local_seconds Timezone::to_local(Timestamp utc) const {
  return std::chrono::local_seconds{utc.time_since_epoch() + offset_at(utc)};
}

Timestamp Timezone::from_local(std::chrono::local_seconds local) const {
  const Timestamp guess{local.time_since_epoch() - Seconds{base_offset_}};
  // Try the offsets in force around the guess; keep the earliest consistent instant.
  const Seconds candidates[] = {offset_at(guess - hours{26}), offset_at(guess), offset_at(guess + hours{26})};
  Timestamp best = Timestamp::max();
  for (auto off : candidates) {
    const Timestamp t{local.time_since_epoch() - off};
    if (offset_at(t) == off && t < best) best = t;
  }
  if (best != Timestamp::max()) return best;
  return Timestamp{local.time_since_epoch() - offset_at(guess - hours{26})};
}

Timestamp Timezone::next_transition(Timestamp t) const {
  const auto v = to_unix(t);
  auto it = std::upper_bound(transitions_.begin(), transitions_.end(), v,
                             [](std::int64_t x, const Transition& tr) { return x < tr.at; });
  if (it == transitions_.end()) return Timestamp::max();
  return from_unix(it->at);
}

Date Timezone::local_date(Timestamp utc) const {
  return Date{floor<days>(to_local(utc)).time_since_epoch()};
}

Timestamp Timezone::start_of_day(Date local_day) const {
  return from_local(local_seconds{local_days{local_day.time_since_epoch()}.time_since_epoch()});
}

}  // namespace hems
