#pragma once

#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "hems/core/types.hpp"
#include "hems/core/vocabulary.hpp"

namespace hems {

/// One debit recorded against a device's credit.
struct CreditCharge {
  std::string device_id;
  std::string event_key;
  Money charged;       // full event cost, even when the balance floors at zero
  Money credit_after;

  bool operator==(const CreditCharge&) const = default;
};

/// Devices of one household plus their credit balances.
///
/// Writers are serialized; readers get copies taken under a shared lock, so
/// they always observe a consistent snapshot.
class DeviceRegistry {
 public:
  DeviceRegistry(Vocabulary device_types, Vocabulary rooms);

  /// Throws ValidationError on vocabulary misses or negative credit,
  /// ConflictError on a duplicate id.
  std::string register_device(const DeviceMetadata& metadata);
  /// Replaces every field except the id; same validation as registration.
  void update_device(const DeviceMetadata& metadata);

  std::optional<DeviceMetadata> find(const std::string& device_id) const;
  std::vector<DeviceMetadata> list() const;

  /// credit' = max(0, credit - cost). Throws on unpriced events, unknown
  /// devices, and replays of an already applied event.
  Money apply_event_to_credit(const std::string& device_id, const UsageEvent& event);
  bool was_applied(const std::string& event_key) const;
  std::vector<CreditCharge> charges() const;

  /// Restores persisted state without re-validating charges.
  void restore(std::vector<DeviceMetadata> devices, std::vector<CreditCharge> charges);

  const Vocabulary& device_types() const { return device_types_; }
  const Vocabulary& rooms() const { return rooms_; }

 private:
  void validate(const DeviceMetadata& metadata) const;

  Vocabulary device_types_;
  Vocabulary rooms_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, DeviceMetadata> devices_;
  std::set<std::string> applied_;
  std::vector<CreditCharge> charges_;
};

}  // namespace hems
