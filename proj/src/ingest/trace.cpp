#include "hems/ingest/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "hems/error.hpp"
#include "hems/text.hpp"

namespace hems {
namespace {

struct Row {
  std::int64_t t;
  std::vector<std::optional<double>> values;
};

bool parse_epoch(std::string_view s, std::int64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_cell(std::string_view s, std::optional<double>& out) {
  s = trim(s);
  if (s.empty() || s == "NULL") {
    out.reset();
    return true;
  }
  double v = 0;
  if (!parse_double(s, v) || !std::isfinite(v) || v < 0.0) return false;
  out = v;
  return true;
}

}  // namespace

TraceParseResult parse_trace(std::string_view text, const TraceParseOptions& options) {
  TraceParseResult result;
  auto lines = split_lines(text);

  std::size_t i = 0;
  while (i < lines.size() && (trim(lines[i]).empty() || trim(lines[i]).front() == '#')) ++i;
  if (i == lines.size()) throw ParseError("trace has no header row");

  auto header = split(lines[i], ',');
  if (header.size() < 2 || trim(header[0]) != "timestamp") {
    throw ParseError("trace header must start with 'timestamp' followed by channel ids");
  }
  std::set<std::string, std::less<>> seen;
  std::vector<Direction> directions;
  for (std::size_t c = 1; c < header.size(); ++c) {
    auto id = std::string{trim(header[c])};
    if (id.empty()) throw ParseError(fmt::format("empty channel id in header column {}", c + 1));
    if (!seen.insert(id).second) throw ParseError(fmt::format("duplicate channel '{}' in header", id));
    auto dir = options.directions.find(id);
    directions.push_back(dir == options.directions.end() ? Direction::consumption : dir->second);
    result.channels.push_back(std::move(id));
  }

  std::vector<Row> rows;
  for (++i; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    ++result.rows;
    auto cells = split(line, ',');
    Row row;
    bool ok = cells.size() == header.size() && parse_epoch(cells[0], row.t);
    row.values.resize(result.channels.size());
    for (std::size_t c = 1; ok && c < cells.size(); ++c) ok = parse_cell(cells[c], row.values[c - 1]);
    if (!ok) {
      ++result.malformed_rows;
      continue;
    }
    rows.push_back(std::move(row));
  }

  const bool sorted = std::is_sorted(rows.begin(), rows.end(),
                                     [](const Row& a, const Row& b) { return a.t < b.t; });
  if (!sorted) {
    result.reordered = true;
    result.warnings.push_back("timestamps were not monotonic; rows reordered");
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
  }

  std::vector<Row> unique;
  unique.reserve(rows.size());
  for (auto& r : rows) {
    if (!unique.empty() && unique.back().t == r.t) {
      ++result.duplicate_rows;
      continue;
    }
    unique.push_back(std::move(r));
  }
  if (result.duplicate_rows > 0) {
    result.warnings.push_back(fmt::format("{} duplicated timestamp row(s) dropped", result.duplicate_rows));
  }
  if (result.malformed_rows > 0) {
    result.warnings.push_back(fmt::format("{} malformed row(s) skipped", result.malformed_rows));
  }
  if (!unique.empty() && unique.back().t - unique.front().t >= 86400) {
    result.warnings.push_back("trace spans more than one day");
  }

  result.samples.reserve(unique.size() * result.channels.size());
  for (const auto& r : unique) {
    for (std::size_t c = 0; c < result.channels.size(); ++c) {
      result.samples.push_back({result.channels[c], from_unix(r.t), r.values[c], directions[c]});
    }
  }
  return result;
}

std::string serialize_trace(std::span<const PowerSample> samples) {
  std::vector<std::string> channels;
  std::map<std::string, std::size_t, std::less<>> column;
  std::map<std::int64_t, std::vector<std::optional<double>>> grid;
  for (const auto& s : samples) {
    if (column.emplace(s.channel_id, channels.size()).second) channels.push_back(s.channel_id);
  }
  for (const auto& s : samples) {
    auto& row = grid[to_unix(s.timestamp)];
    row.resize(channels.size());
    row[column.at(s.channel_id)] = s.power_w;
  }

  std::string out = "timestamp";
  for (const auto& c : channels) out += "," + c;
  out += "\n";
  for (auto& [t, row] : grid) {
    row.resize(channels.size());
    out += std::to_string(t);
    for (const auto& v : row) {
      out += ",";
      if (v) out += fmt::format("{}", *v);
    }
    out += "\n";
  }
  return out;
}

std::vector<PowerSample> resample(std::span<const PowerSample> samples, Seconds period) {
  if (period <= Seconds{0}) throw ValidationError("resample period must be positive");
  std::vector<PowerSample> out;
  if (samples.empty()) return out;
  for (const auto& s : samples) {
    if (s.channel_id != samples.front().channel_id) {
      throw ValidationError("resample expects samples of a single channel");
    }
  }

  const auto p = period.count();
  auto bin_of = [p](Timestamp t) {
    const auto v = to_unix(t);
    return (v >= 0 ? v / p : -((-v + p - 1) / p)) * p;
  };

  std::size_t i = 0;
  while (i < samples.size()) {
    const auto bin = bin_of(samples[i].timestamp);
    double sum = 0.0;
    std::size_t n = 0;
    std::size_t j = i;
    for (; j < samples.size() && bin_of(samples[j].timestamp) == bin; ++j) {
      if (samples[j].power_w) {
        sum += *samples[j].power_w;
        ++n;
      }
    }
    if (j == i) throw ValidationError("resample expects samples sorted by timestamp");
    PowerSample s{samples[i].channel_id, from_unix(bin), std::nullopt, samples[i].direction};
    if (n > 0) s.power_w = sum / static_cast<double>(n);
    if (!out.empty() && out.back().timestamp >= s.timestamp) {
      throw ValidationError("resample expects samples sorted by timestamp");
    }
    out.push_back(std::move(s));
    i = j;
  }
  return out;
}

std::vector<PowerSample> merge_channels(std::span<const std::vector<PowerSample>> channels,
                                        std::span<const double> weights,
                                        const std::string& aggregate_id, GapPolicy policy) {
  if (weights.size() != channels.size()) {
    throw ValidationError("merge_channels needs one weight per channel");
  }
  std::optional<Direction> direction;
  std::vector<std::int64_t> grid;
  for (const auto& ch : channels) {
    for (const auto& s : ch) {
      if (direction && *direction != s.direction) {
        throw ValidationError("cannot merge consumption and production channels");
      }
      direction = s.direction;
      grid.push_back(to_unix(s.timestamp));
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<PowerSample> out;
  out.reserve(grid.size());
  std::vector<std::size_t> cursor(channels.size(), 0);
  std::vector<std::optional<std::pair<std::int64_t, double>>> last(channels.size());
  const auto hold = policy.max_hold.count();

  for (auto g : grid) {
    double sum = 0.0;
    bool any = false;
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const auto& ch = channels[c];
      auto& k = cursor[c];
      while (k < ch.size() && to_unix(ch[k].timestamp) <= g) {
        if (ch[k].power_w) last[c] = std::make_pair(to_unix(ch[k].timestamp), *ch[k].power_w);
        ++k;
      }
      if (last[c] && g - last[c]->first <= hold) {
        sum += weights[c] * last[c]->second;
        any = true;
      }
    }
    PowerSample s{aggregate_id, from_unix(g), std::nullopt, direction.value_or(Direction::consumption)};
    if (any) s.power_w = sum;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PowerSample> merge_channels(std::span<const std::vector<PowerSample>> channels,
                                        const std::string& aggregate_id, GapPolicy policy) {
  std::vector<double> ones(channels.size(), 1.0);
  return merge_channels(channels, ones, aggregate_id, policy);
}

}  // namespace hems
