#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hems/money.hpp"
#include "hems/time.hpp"

namespace hems {

enum class Direction { consumption, production };
enum class Mobility { fixed, portable };

std::string_view to_string(Direction d);
std::string_view to_string(Mobility m);
Direction parse_direction(std::string_view s);
Mobility parse_mobility(std::string_view s);

/// Annotation attached to every monitored device.
struct DeviceMetadata {
  std::string device_id;
  std::string device_type;  // from the device-type vocabulary
  std::string room;         // from the room vocabulary
  Mobility mobility = Mobility::fixed;
  bool curtailable = false;
  bool user_driven = false;  // operated on explicit user demand
  bool has_standby = false;
  Money credit;

  bool operator==(const DeviceMetadata&) const = default;
};

/// One reading on a channel. An absent power value is an explicit gap.
struct PowerSample {
  std::string channel_id;
  Timestamp timestamp;
  std::optional<double> power_w;
  Direction direction = Direction::consumption;

  bool operator==(const PowerSample&) const = default;
};

/// (device, t_start, duration, energy) plus the price once known.
struct UsageEvent {
  std::string device_id;
  Timestamp t_start;
  Seconds duration{0};
  double energy_kwh = 0.0;
  std::optional<double> cost_eur;

  Timestamp t_end() const { return t_start + duration; }
  /// Identity used for idempotent storage and crediting.
  std::string key() const;

  bool operator==(const UsageEvent&) const = default;
};

struct User {
  std::string user_id;
  std::string token;
  std::string display_name;
};

struct Household {
  std::string household_id;
  std::vector<User> users;
  std::vector<std::string> device_ids;
  std::string tariff;  // the single active scheme
  std::string timezone;
};

}  // namespace hems
