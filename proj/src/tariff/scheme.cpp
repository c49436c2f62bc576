#include "hems/tariff/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "hems/error.hpp"
#include "hems/text.hpp"

namespace hems {
namespace {

constexpr int kMinutesPerDay = 1440;
constexpr std::array<std::string_view, 7> kDayNames{"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};

int day_index(std::string_view name, std::size_t line) {
  for (int i = 0; i < 7; ++i) {
    if (kDayNames[i] == name) return i;
  }
  throw ParseError(fmt::format("tariff line {}: unknown weekday '{}'", line, name));
}

std::array<bool, 7> parse_days(std::string_view spec, std::size_t line) {
  std::array<bool, 7> days{};
  if (spec == "daily" || spec == "all") {
    days.fill(true);
    return days;
  }
  for (auto part : split(spec, ',')) {
    auto dash = part.find('-');
    if (dash == std::string_view::npos) {
      days[day_index(part, line)] = true;
      continue;
    }
    // Ranges run Monday-first so "Mon-Sun" and "Sat-Sun" read naturally.
    auto mon_first = [](int c) { return (c + 6) % 7; };
    int a = mon_first(day_index(part.substr(0, dash), line));
    int b = mon_first(day_index(part.substr(dash + 1), line));
    if (b < a) throw ParseError(fmt::format("tariff line {}: reversed day range '{}'", line, part));
    for (int d = a; d <= b; ++d) days[(d + 1) % 7] = true;
  }
  return days;
}

int parse_clock(std::string_view s, std::size_t line) {
  auto parts = split(s, ':');
  double h = 0, m = 0;
  if (parts.size() != 2 || !parse_double(parts[0], h) || !parse_double(parts[1], m) || h < 0 || h > 24 ||
      m < 0 || m >= 60 || (h == 24 && m != 0) || h != std::floor(h) || m != std::floor(m)) {
    throw ParseError(fmt::format("tariff line {}: bad clock time '{}'", line, s));
  }
  return static_cast<int>(h) * 60 + static_cast<int>(m);
}

std::optional<double> parse_bound(std::string_view s, std::size_t line) {
  if (s == "-" || s == "inf") return std::nullopt;
  double v = 0;
  if (!parse_double(s, v) || v < 0) throw ParseError(fmt::format("tariff line {}: bad bound '{}'", line, s));
  return v;
}

}  // namespace

TariffScheme TariffScheme::parse(std::string_view text) {
  TariffScheme s;
  std::string section;
  std::vector<std::tuple<std::string, std::string, double, std::size_t>> raw_prices;

  std::size_t line_no = 0;
  for (auto raw : split_lines(text)) {
    ++line_no;
    auto line = strip_comment(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(fmt::format("tariff line {}: bad section header", line_no));
      section = std::string{line.substr(1, line.size() - 2)};
      if (section != "slots" && section != "categories" && section != "prices") {
        throw ParseError(fmt::format("tariff line {}: unknown section '{}'", line_no, section));
      }
      continue;
    }
    if (section.empty()) {
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(fmt::format("tariff line {}: expected key = value", line_no));
      auto key = trim(line.substr(0, eq));
      auto value = std::string{trim(line.substr(eq + 1))};
      if (key == "name") s.name_ = value;
      else if (key == "currency") s.currency_ = value;
      else if (key == "default_slot") s.default_slot_ = value;
      else throw ParseError(fmt::format("tariff line {}: unknown key '{}'", line_no, key));
      continue;
    }

    auto f = split_ws(line);
    if (section == "slots") {
      if (f.size() != 4 && f.size() != 5) {
        throw ParseError(fmt::format("tariff line {}: expected 'slot days from to [exclude|include]'", line_no));
      }
      SlotRule rule;
      rule.slot_id = std::string{f[0]};
      rule.weekdays = parse_days(f[1], line_no);
      rule.from_minute = parse_clock(f[2], line_no);
      rule.to_minute = parse_clock(f[3], line_no);
      if (rule.from_minute >= rule.to_minute) {
        throw ParseError(fmt::format("tariff line {}: empty or reversed interval", line_no));
      }
      if (f.size() == 5) {
        if (f[4] == "exclude") rule.exclude_holidays = true;
        else if (f[4] == "include") rule.exclude_holidays = false;
        else throw ParseError(fmt::format("tariff line {}: holiday flag must be exclude|include", line_no));
      }
      s.rules_.push_back(std::move(rule));
    } else if (section == "categories") {
      if (f.size() != 3) throw ParseError(fmt::format("tariff line {}: expected 'id lower upper'", line_no));
      s.categories_.push_back({std::string{f[0]}, parse_bound(f[1], line_no), parse_bound(f[2], line_no)});
    } else {
      double p = 0;
      if (f.size() != 3 || !parse_double(f[2], p) || p < 0) {
        throw ParseError(fmt::format("tariff line {}: expected 'slot category price'", line_no));
      }
      raw_prices.emplace_back(std::string{f[0]}, std::string{f[1]}, p, line_no);
    }
  }

  if (s.default_slot_.empty()) throw ValidationError("tariff scheme needs a default_slot");
  for (const auto& r : s.rules_) {
    if (std::find(s.slots_.begin(), s.slots_.end(), r.slot_id) == s.slots_.end()) s.slots_.push_back(r.slot_id);
  }
  if (std::find(s.slots_.begin(), s.slots_.end(), s.default_slot_) == s.slots_.end()) {
    s.slots_.push_back(s.default_slot_);
  }
  if (s.slots_.size() > 255) throw ValidationError("too many tariff slots");

  s.prices_.assign(s.slots_.size(), std::vector<double>(s.categories_.size(), std::nan("")));
  for (const auto& [slot, cat, price, line] : raw_prices) {
    auto si = std::find(s.slots_.begin(), s.slots_.end(), slot);
    if (si == s.slots_.end()) throw ValidationError(fmt::format("tariff line {}: unknown slot '{}'", line, slot));
    auto ci = std::find_if(s.categories_.begin(), s.categories_.end(),
                           [&](const ConsumptionCategory& c) { return c.id == cat; });
    if (ci == s.categories_.end()) {
      throw ValidationError(fmt::format("tariff line {}: unknown category '{}'", line, cat));
    }
    auto& cell = s.prices_[si - s.slots_.begin()][ci - s.categories_.begin()];
    if (!std::isnan(cell)) throw ValidationError(fmt::format("tariff line {}: duplicate price", line));
    cell = price;
  }
  s.validate();
  return s;
}

TariffScheme TariffScheme::load(const std::filesystem::path& path) { return parse(read_file(path)); }

void TariffScheme::validate() {
  const auto default_idx = static_cast<std::uint8_t>(slot_index(default_slot_));
  table_workday_.assign(7 * kMinutesPerDay, default_idx);
  table_holiday_.assign(7 * kMinutesPerDay, default_idx);
  std::vector<bool> claimed(7 * kMinutesPerDay, false);
  std::set<int> edges{0};
  for (const auto& r : rules_) {
    const auto idx = static_cast<std::uint8_t>(slot_index(r.slot_id));
    edges.insert(r.from_minute);
    if (r.to_minute < kMinutesPerDay) edges.insert(r.to_minute);
    for (int d = 0; d < 7; ++d) {
      if (!r.weekdays[d]) continue;
      for (int m = r.from_minute; m < r.to_minute; ++m) {
        const auto k = d * kMinutesPerDay + m;
        if (claimed[k]) {
          throw ValidationError(fmt::format("slot rules overlap on {} at minute {}", kDayNames[d], m));
        }
        claimed[k] = true;
        table_workday_[k] = idx;
        if (!r.exclude_holidays) table_holiday_[k] = idx;
      }
    }
  }
  edges_.assign(edges.begin(), edges.end());

  if (categories_.empty()) throw ValidationError("tariff scheme needs at least one category");
  if (categories_.front().lower_kwh && *categories_.front().lower_kwh > 0) {
    throw ValidationError("first category must start at zero");
  }
  if (categories_.back().upper_kwh) throw ValidationError("last category must be open-ended");
  for (std::size_t k = 0; k < categories_.size(); ++k) {
    const auto& c = categories_[k];
    if (k + 1 < categories_.size() && !c.upper_kwh) {
      throw ValidationError(fmt::format("category {} needs an upper bound", c.id));
    }
    if (c.lower_kwh && c.upper_kwh && *c.lower_kwh > *c.upper_kwh) {
      throw ValidationError(fmt::format("category {} has reversed bounds", c.id));
    }
    if (k > 0) {
      const double prev = *categories_[k - 1].upper_kwh;
      if (!c.lower_kwh || (*c.lower_kwh != prev + 1 && *c.lower_kwh != prev)) {
        throw ValidationError(fmt::format("category {} does not continue from {}", c.id, categories_[k - 1].id));
      }
    }
  }

  for (std::size_t si = 0; si < slots_.size(); ++si) {
    for (std::size_t ci = 0; ci < categories_.size(); ++ci) {
      if (std::isnan(prices_[si][ci])) {
        throw ValidationError(fmt::format("no price for ({}, {})", slots_[si], categories_[ci].id));
      }
      if (ci > 0 && prices_[si][ci] < prices_[si][ci - 1]) {
        throw ValidationError(fmt::format("price decreases with category in slot {}", slots_[si]));
      }
    }
  }
}

std::size_t TariffScheme::slot_index(unsigned weekday_c, int minute_of_day, bool holiday) const {
  const auto k = weekday_c * kMinutesPerDay + minute_of_day;
  return holiday ? table_holiday_[k] : table_workday_[k];
}

std::size_t TariffScheme::slot_index(std::string_view slot_id) const {
  auto it = std::find(slots_.begin(), slots_.end(), slot_id);
  if (it == slots_.end()) throw NotFoundError(fmt::format("unknown slot '{}'", slot_id));
  return static_cast<std::size_t>(it - slots_.begin());
}

std::size_t TariffScheme::category_index(std::string_view category_id) const {
  auto it = std::find_if(categories_.begin(), categories_.end(),
                         [&](const ConsumptionCategory& c) { return c.id == category_id; });
  if (it == categories_.end()) throw NotFoundError(fmt::format("unknown category '{}'", category_id));
  return static_cast<std::size_t>(it - categories_.begin());
}

double TariffScheme::price(std::string_view slot_id, std::string_view category_id) const {
  return prices_[slot_index(slot_id)][category_index(category_id)];
}

}  // namespace hems
