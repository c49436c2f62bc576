#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hems/advisor/advice.hpp"
#include "hems/core/types.hpp"
#include "hems/detect/detector.hpp"
#include "hems/service/auth.hpp"

namespace hems {

struct DetectorSettings {
  DetectorConfig defaults;
  std::map<std::string, DetectorConfig> per_device;
  const DetectorConfig& for_device(const std::string& device_id) const;
};

/// Household configuration file (JSON). Relative paths resolve against the
/// file's directory.
///
///     {
///       "household_id": "home-1",
///       "timezone": "Europe/Rome",
///       "data_dir": "state",
///       "tariff_file": "tariff_it.txt",
///       "holiday_file": "holidays_it.txt",
///       "device_types_file": "device_types.txt",
///       "rooms_file": "rooms.txt",
///       "category": "C1",
///       "detector": {"on_threshold_w": 15, "devices": {"wm": {"min_duration_s": 300}}},
///       "advisor": {"tau1": 0.3, "max_displayed": 5, "rng_seed": 42},
///       "devices": [{"device_id": "wm", "device_type": "washing machine", ...}],
///       "tokens": [{"token": "...", "user_id": "anna", "scopes": ["read", "write"]}]
///     }
struct AppConfig {
  std::filesystem::path source;
  std::string household_id = "home";
  std::string timezone = "UTC";
  std::filesystem::path data_dir;
  std::filesystem::path tariff_file;
  std::filesystem::path holiday_file;
  std::filesystem::path device_types_file;
  std::filesystem::path rooms_file;
  std::optional<std::filesystem::path> label_file;
  std::optional<std::filesystem::path> templates_file;
  std::optional<std::filesystem::path> fleet_stats_file;
  std::string category = "auto";  // or a category id
  DetectorSettings detector;
  AdvisorConfig advisor;
  std::map<std::string, Direction, std::less<>> directions;  // channels not listed are consumption
  std::string aggregate_channel;                              // empty = none
  std::vector<DeviceMetadata> devices;                        // registered at startup if absent
  std::vector<ApiToken> tokens;
  std::string default_user = "owner";

  /// Throws ValidationError on bad values or referenced files that are missing.
  static AppConfig parse(std::string_view json_text, const std::filesystem::path& base_dir);
  static AppConfig load(const std::filesystem::path& path);

  std::filesystem::path database() const { return data_dir / "hems.db"; }
  Direction direction_of(const std::string& channel) const;
};

}  // namespace hems
