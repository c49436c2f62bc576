#include "hems/app/config.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "hems/error.hpp"
#include "hems/text.hpp"

namespace hems {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

fs::path required_file(const json& j, const char* key, const fs::path& base) {
  if (!j.contains(key)) throw ValidationError(fmt::format("config: missing '{}'", key));
  auto path = resolve(base, j.at(key).get<std::string>());
  if (!fs::is_regular_file(path)) {
    throw ValidationError(fmt::format("config: {} '{}' does not exist", key, path.string()));
  }
  return path;
}

std::optional<fs::path> optional_file(const json& j, const char* key, const fs::path& base) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return required_file(j, key, base);
}

DetectorConfig detector_from(const json& j, DetectorConfig cfg) {
  if (j.contains("on_threshold_w")) cfg.on_threshold_w = j.at("on_threshold_w").get<double>();
  if (j.contains("off_threshold_w")) cfg.off_threshold_w = j.at("off_threshold_w").get<double>();
  if (j.contains("min_duration_s")) cfg.min_duration = Seconds{j.at("min_duration_s").get<std::int64_t>()};
  if (j.contains("merge_gap_s")) cfg.merge_gap = Seconds{j.at("merge_gap_s").get<std::int64_t>()};
  if (j.contains("max_hold_s")) cfg.gaps.max_hold = Seconds{j.at("max_hold_s").get<std::int64_t>()};
  cfg.validate();
  return cfg;
}

DeviceMetadata device_from(const json& j) {
  DeviceMetadata d;
  d.device_id = j.at("device_id").get<std::string>();
  d.device_type = j.at("device_type").get<std::string>();
  d.room = j.value("room", std::string{});
  d.mobility = parse_mobility(j.value("mobility", std::string{"fixed"}));
  d.curtailable = j.value("curtailable", false);
  d.user_driven = j.value("user_driven", false);
  d.has_standby = j.value("has_standby", false);
  d.credit = Money::from_eur(j.value("credit_eur", 0.0));
  return d;
}

}  // namespace

const DetectorConfig& DetectorSettings::for_device(const std::string& device_id) const {
  auto it = per_device.find(device_id);
  return it == per_device.end() ? defaults : it->second;
}

Direction AppConfig::direction_of(const std::string& channel) const {
  auto it = directions.find(channel);
  return it == directions.end() ? Direction::consumption : it->second;
}

AppConfig AppConfig::parse(std::string_view json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("config: {}", e.what()));
  }
  if (!j.is_object()) throw ParseError("config: top level must be an object");

  AppConfig cfg;
  try {
    cfg.household_id = j.value("household_id", cfg.household_id);
    cfg.timezone = j.value("timezone", cfg.timezone);
    cfg.data_dir = resolve(base_dir, j.value("data_dir", std::string{"."}));
    cfg.tariff_file = required_file(j, "tariff_file", base_dir);
    cfg.holiday_file = required_file(j, "holiday_file", base_dir);
    cfg.device_types_file = required_file(j, "device_types_file", base_dir);
    cfg.rooms_file = required_file(j, "rooms_file", base_dir);
    cfg.label_file = optional_file(j, "label_file", base_dir);
    cfg.templates_file = optional_file(j, "templates_file", base_dir);
    cfg.fleet_stats_file = optional_file(j, "fleet_stats_file", base_dir);
    cfg.category = j.value("category", cfg.category);
    cfg.aggregate_channel = j.value("aggregate_channel", std::string{});
    cfg.default_user = j.value("default_user", cfg.default_user);

    if (j.contains("detector")) {
      const auto& d = j.at("detector");
      cfg.detector.defaults = detector_from(d, {});
      if (d.contains("devices")) {
        for (const auto& [id, over] : d.at("devices").items()) {
          cfg.detector.per_device[id] = detector_from(over, cfg.detector.defaults);
        }
      }
    }
    if (j.contains("advisor")) {
      const auto& a = j.at("advisor");
      cfg.advisor.tau1 = a.value("tau1", cfg.advisor.tau1);
      cfg.advisor.max_displayed = a.value("max_displayed", cfg.advisor.max_displayed);
      cfg.advisor.rng_seed = a.value("rng_seed", cfg.advisor.rng_seed);
      cfg.advisor.min_shift_saving_eur = a.value("min_shift_saving_eur", cfg.advisor.min_shift_saving_eur);
    }
    cfg.advisor.validate();
    if (j.contains("channels")) {
      for (const auto& [ch, dir] : j.at("channels").items()) cfg.directions[ch] = parse_direction(dir.get<std::string>());
    }
    if (j.contains("devices")) {
      for (const auto& d : j.at("devices")) cfg.devices.push_back(device_from(d));
    }
    if (j.contains("tokens")) {
      for (const auto& t : j.at("tokens")) {
        ApiToken tok;
        tok.token = t.at("token").get<std::string>();
        tok.user_id = t.at("user_id").get<std::string>();
        tok.household_id = t.value("household_id", cfg.household_id);
        tok.can_read = tok.can_write = false;
        for (const auto& s : t.value("scopes", json::array({"read"}))) {
          const auto scope = s.get<std::string>();
          if (scope == "read") tok.can_read = true;
          else if (scope == "write") tok.can_write = true;
          else throw ValidationError(fmt::format("config: unknown token scope '{}'", scope));
        }
        if (tok.token.empty()) throw ValidationError("config: empty token");
        cfg.tokens.push_back(std::move(tok));
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("config: {}", e.what()));
  }
  return cfg;
}

AppConfig AppConfig::load(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw ValidationError(fmt::format("config file '{}' not found", path.string()));
  auto cfg = parse(read_file(path), fs::absolute(path).parent_path());
  cfg.source = path;
  return cfg;
}

}  // namespace hems
