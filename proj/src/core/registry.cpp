#include "hems/core/registry.hpp"

#include <algorithm>
#include <mutex>

#include <fmt/format.h>

#include "hems/error.hpp"

namespace hems {

std::string_view to_string(Direction d) {
  return d == Direction::consumption ? "consumption" : "production";
}

std::string_view to_string(Mobility m) { return m == Mobility::fixed ? "fixed" : "portable"; }

Direction parse_direction(std::string_view s) {
  if (s == "consumption") return Direction::consumption;
  if (s == "production") return Direction::production;
  throw ValidationError(fmt::format("unknown direction '{}'", s));
}

Mobility parse_mobility(std::string_view s) {
  if (s == "fixed") return Mobility::fixed;
  if (s == "portable") return Mobility::portable;
  throw ValidationError(fmt::format("unknown mobility '{}'", s));
}

std::string UsageEvent::key() const {
  return fmt::format("{}@{}", device_id, to_unix(t_start));
}

DeviceRegistry::DeviceRegistry(Vocabulary device_types, Vocabulary rooms)
    : device_types_(std::move(device_types)), rooms_(std::move(rooms)) {}

void DeviceRegistry::validate(const DeviceMetadata& m) const {
  if (m.device_id.empty()) throw ValidationError("device_id must not be empty");
  if (!device_types_.contains(m.device_type)) {
    throw ValidationError(fmt::format("device type '{}' is not in the vocabulary", m.device_type));
  }
  if (!rooms_.contains(m.room)) {
    throw ValidationError(fmt::format("room '{}' is not in the vocabulary", m.room));
  }
  if (m.credit < Money{}) throw ValidationError("credit must not be negative");
}

std::string DeviceRegistry::register_device(const DeviceMetadata& metadata) {
  validate(metadata);
  std::unique_lock lock(mutex_);
  if (devices_.count(metadata.device_id)) {
    throw ConflictError(fmt::format("device '{}' already registered", metadata.device_id));
  }
  devices_.emplace(metadata.device_id, metadata);
  return metadata.device_id;
}

void DeviceRegistry::update_device(const DeviceMetadata& metadata) {
  validate(metadata);
  std::unique_lock lock(mutex_);
  auto it = devices_.find(metadata.device_id);
  if (it == devices_.end()) throw NotFoundError(fmt::format("unknown device '{}'", metadata.device_id));
  it->second = metadata;
}

std::optional<DeviceMetadata> DeviceRegistry::find(const std::string& device_id) const {
  std::shared_lock lock(mutex_);
  auto it = devices_.find(device_id);
  if (it == devices_.end()) return std::nullopt;
  return it->second;
}

std::vector<DeviceMetadata> DeviceRegistry::list() const {
  std::shared_lock lock(mutex_);
  std::vector<DeviceMetadata> out;
  out.reserve(devices_.size());
  for (const auto& [id, m] : devices_) out.push_back(m);
  return out;
}

Money DeviceRegistry::apply_event_to_credit(const std::string& device_id, const UsageEvent& event) {
  if (!event.cost_eur) throw ValidationError(fmt::format("event {} has not been priced", event.key()));
  if (event.device_id != device_id) {
    throw ValidationError(fmt::format("event {} belongs to another device", event.key()));
  }
  std::unique_lock lock(mutex_);
  auto it = devices_.find(device_id);
  if (it == devices_.end()) throw NotFoundError(fmt::format("unknown device '{}'", device_id));
  const auto key = event.key();
  if (applied_.count(key)) throw ConflictError(fmt::format("event {} already applied", key));

  const Money cost = Money::from_eur(*event.cost_eur);
  Money& credit = it->second.credit;
  credit = std::max(Money{}, credit - cost);
  applied_.insert(key);
  charges_.push_back({device_id, key, cost, credit});
  return credit;
}

bool DeviceRegistry::was_applied(const std::string& event_key) const {
  std::shared_lock lock(mutex_);
  return applied_.count(event_key) > 0;
}

std::vector<CreditCharge> DeviceRegistry::charges() const {
  std::shared_lock lock(mutex_);
  return charges_;
}

void DeviceRegistry::restore(std::vector<DeviceMetadata> devices, std::vector<CreditCharge> charges) {
  std::unique_lock lock(mutex_);
  devices_.clear();
  for (auto& d : devices) devices_.emplace(d.device_id, std::move(d));
  applied_.clear();
  for (const auto& c : charges) applied_.insert(c.event_key);
  charges_ = std::move(charges);
}

}  // namespace hems
