#pragma once

// Shared helpers for the unit and acceptance suites: scratch directories,
// household configs, synthetic traces, and brute-force reference math that
// does not reuse library code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hems/core/types.hpp"

namespace fixtures {

namespace fs = std::filesystem;
using hems::PowerSample;
using hems::Seconds;
using hems::Timestamp;

inline fs::path data_dir() { return HEMS_DATA_DIR; }
inline std::string cli_path() { return HEMS_CLI; }

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("hems-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  f << text;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct DeviceSpec {
  std::string id;
  std::string type;
  std::string room = "kitchen";
  bool user_driven = false;
  bool has_standby = false;
  bool curtailable = false;
  double credit_eur = 0.0;
};

struct ConfigSpec {
  std::string household_id = "home";
  std::string timezone = "Europe/Rome";
  std::string category = "C1";
  std::vector<DeviceSpec> devices;
  std::string fleet_stats_file;  // empty = none
  int max_displayed = 5;
  unsigned long long seed = 42;
  double tau1 = 0.30;
  double min_shift_saving_eur = 0.01;
  std::string extra_json;  // appended verbatim inside the top-level object
};

/// Writes <dir>/config.json pointing at the shipped data files.
inline fs::path write_config(const fs::path& dir, const ConfigSpec& c) {
  const auto d = data_dir().string();
  std::ostringstream o;
  o << "{\n"
    << "  \"household_id\": \"" << c.household_id << "\",\n"
    << "  \"timezone\": \"" << c.timezone << "\",\n"
    << "  \"data_dir\": \"state\",\n"
    << "  \"tariff_file\": \"" << d << "/tariff_it.txt\",\n"
    << "  \"holiday_file\": \"" << d << "/holidays_it.txt\",\n"
    << "  \"device_types_file\": \"" << d << "/device_types.txt\",\n"
    << "  \"rooms_file\": \"" << d << "/rooms.txt\",\n"
    << "  \"label_file\": \"" << d << "/label_coefficients.txt\",\n"
    << "  \"templates_file\": \"" << d << "/templates.txt\",\n";
  if (!c.fleet_stats_file.empty()) o << "  \"fleet_stats_file\": \"" << c.fleet_stats_file << "\",\n";
  o << "  \"category\": \"" << c.category << "\",\n"
    << "  \"advisor\": {\"tau1\": " << c.tau1 << ", \"max_displayed\": " << c.max_displayed
    << ", \"rng_seed\": " << c.seed << ", \"min_shift_saving_eur\": " << c.min_shift_saving_eur << "},\n"
    << "  \"tokens\": [\n"
    << "    {\"token\": \"rw-secret\", \"user_id\": \"anna\", \"scopes\": [\"read\", \"write\"]},\n"
    << "    {\"token\": \"ro-secret\", \"user_id\": \"anna\", \"scopes\": [\"read\"]},\n"
    << "    {\"token\": \"bob-secret\", \"user_id\": \"bob\", \"scopes\": [\"read\", \"write\"]}\n"
    << "  ],\n"
    << "  \"default_user\": \"anna\",\n";
  if (!c.extra_json.empty()) o << c.extra_json << ",\n";
  o << "  \"devices\": [";
  for (std::size_t i = 0; i < c.devices.size(); ++i) {
    const auto& dv = c.devices[i];
    o << (i ? ",\n" : "\n") << "    {\"device_id\": \"" << dv.id << "\", \"device_type\": \"" << dv.type
      << "\", \"room\": \"" << dv.room << "\", \"user_driven\": " << (dv.user_driven ? "true" : "false")
      << ", \"has_standby\": " << (dv.has_standby ? "true" : "false")
      << ", \"curtailable\": " << (dv.curtailable ? "true" : "false") << ", \"credit_eur\": " << dv.credit_eur
      << "}";
  }
  o << "\n  ]\n}\n";
  const auto path = dir / "config.json";
  write_text(path, o.str());
  return path;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

/// Runs a shell command, capturing stdout; stderr is discarded.
inline RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* p = ::popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!p) return r;
  char buf[65536];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string quote(const std::string& s) { return "'" + s + "'"; }

// ---------------------------------------------------------------------------
// Calendar reference: European summer time for Central Europe, computed from
// the rule (last Sunday of March/October at 01:00 UTC) without the library.

inline std::int64_t last_sunday_utc_1am(int year, unsigned month) {
  using namespace std::chrono;
  const sys_days last{year_month_day_last{std::chrono::year{year}, month_day_last{std::chrono::month{month}}}};
  const weekday wd{last};
  const sys_days sunday = last - days{wd.c_encoding()};
  return (sunday.time_since_epoch().count()) * 86400LL + 3600;
}

inline std::int64_t rome_offset(std::int64_t utc) {
  using namespace std::chrono;
  const int year = int(year_month_day{floor<days>(sys_seconds{seconds{utc}})}.year());
  const bool summer = utc >= last_sunday_utc_1am(year, 3) && utc < last_sunday_utc_1am(year, 10);
  return summer ? 7200 : 3600;
}

struct LocalParts {
  std::chrono::sys_days date;  // local calendar date
  unsigned weekday_c;          // Sunday = 0
  int minute;                  // of the local day
};

inline LocalParts rome_local(std::int64_t utc) {
  const std::int64_t local = utc + rome_offset(utc);
  std::int64_t day = local >= 0 ? local / 86400 : (local - 86399) / 86400;
  const std::chrono::sys_days date{std::chrono::days{day}};
  const int minute = static_cast<int>((local - day * 86400) / 60);
  return {date, std::chrono::weekday{date}.c_encoding(), minute};
}

/// Reads ISO dates, one per line, '#' comments.
inline std::vector<std::chrono::sys_days> read_holidays(const fs::path& p) {
  std::vector<std::chrono::sys_days> out;
  std::istringstream in(read_text(p));
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    int y, m, d;
    if (std::sscanf(line.c_str(), " %d-%d-%d", &y, &m, &d) == 3) {
      out.push_back(std::chrono::sys_days{std::chrono::year{y} / m / d});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dense-grid integration reference: power at each whole second under the
// hold rule, derived from the readings directly.

/// Per-second power over [t0, t1); nullopt where nothing was observed.
/// Readings must be one channel, strictly increasing.
inline std::vector<std::optional<double>> dense_grid(const std::vector<PowerSample>& s, std::int64_t t0,
                                                     std::int64_t t1, std::int64_t max_hold = 5) {
  std::vector<std::optional<double>> grid(static_cast<std::size_t>(t1 - t0));
  std::int64_t step = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const auto d = hems::to_unix(s[i].timestamp) - hems::to_unix(s[i - 1].timestamp);
    if (d > 0 && (step == 0 || d < step)) step = d;
  }
  if (step == 0) step = 1;
  const std::int64_t bridge = std::max(max_hold, step);
  std::vector<std::size_t> observed;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].power_w) observed.push_back(i);
  }
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const auto t = hems::to_unix(s[observed[k]].timestamp);
    std::int64_t end = t + step;
    if (k + 1 < observed.size()) {
      const auto next = hems::to_unix(s[observed[k + 1]].timestamp);
      if (next - t <= bridge) end = next;
    }
    for (std::int64_t u = std::max(t, t0); u < std::min(end, t1); ++u) grid[u - t0] = *s[observed[k]].power_w;
  }
  return grid;
}

inline double dense_kwh(const std::vector<std::optional<double>>& grid, std::int64_t grid_t0, std::int64_t from,
                        std::int64_t to) {
  double j = 0.0;
  for (std::int64_t u = from; u < to; ++u) {
    if (u >= grid_t0 && u - grid_t0 < static_cast<std::int64_t>(grid.size()) && grid[u - grid_t0]) {
      j += *grid[u - grid_t0];
    }
  }
  return j / 3.6e6;
}

/// Random device trace: pulses with noise over a sub-threshold baseline,
/// sparse missing readings and a few longer dropouts.
inline std::vector<PowerSample> random_trace(const std::string& channel, std::int64_t t0, std::int64_t seconds,
                                             std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> power(static_cast<std::size_t>(seconds));
  std::int64_t t = 0;
  while (t < seconds) {
    const std::int64_t idle = 1 + static_cast<std::int64_t>(u01(rng) * 400);
    for (std::int64_t k = 0; k < idle && t < seconds; ++k, ++t) power[t] = u01(rng) * 8.0;
    const std::int64_t on = 5 + static_cast<std::int64_t>(u01(rng) * 900);
    const double level = 20.0 + u01(rng) * 2000.0;
    for (std::int64_t k = 0; k < on && t < seconds; ++k, ++t) {
      power[t] = std::max(10.5, level * (1.0 + 0.1 * (u01(rng) - 0.5)));
    }
  }
  std::vector<PowerSample> out;
  out.reserve(power.size());
  std::int64_t dropout_until = -1;
  for (std::int64_t k = 0; k < seconds; ++k) {
    if (k < dropout_until) continue;  // row absent
    if (u01(rng) < 0.001) {
      dropout_until = k + 6 + static_cast<std::int64_t>(u01(rng) * 120);
      continue;
    }
    PowerSample s{channel, hems::from_unix(t0 + k), power[k], hems::Direction::consumption};
    if (u01(rng) < 0.01) s.power_w.reset();  // explicit missing cell
    out.push_back(std::move(s));
  }
  return out;
}

/// Renders per-channel samples as one trace CSV (union grid, empty = absent).
inline std::string to_csv(const std::vector<std::vector<PowerSample>>& channels) {
  std::map<std::int64_t, std::vector<std::string>> rows;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    for (const auto& s : channels[c]) {
      auto& row = rows[hems::to_unix(s.timestamp)];
      row.resize(channels.size());
      row[c] = s.power_w ? std::to_string(*s.power_w) : "NULL";
    }
  }
  std::string out = "timestamp";
  for (const auto& ch : channels) out += "," + (ch.empty() ? std::string("?") : ch.front().channel_id);
  out += "\n";
  for (auto& [t, cells] : rows) {
    cells.resize(channels.size());
    out += std::to_string(t);
    for (const auto& c : cells) out += "," + c;
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Advice tie-break reference: FNV-1a over the id, xor the finalized seed,
// then the splitmix64 finalizer.

inline std::uint64_t splitmix_finalize(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t reference_tie_key(const std::string& id, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix_finalize(h ^ splitmix_finalize(seed));
}

}  // namespace fixtures
