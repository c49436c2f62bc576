#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hems/advisor/advice.hpp"
#include "hems/core/registry.hpp"
#include "hems/core/types.hpp"

struct sqlite3;

namespace hems {

/// Durable household state in a single SQLite file.
///
/// Samples are keyed by (channel, timestamp) and events by (device, t_start);
/// re-appending a key is reported as a duplicate and leaves the row as is.
/// All calls are serialized on one connection.
class Store {
 public:
  explicit Store(const std::filesystem::path& path);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  struct AppendResult {
    std::size_t inserted = 0;
    std::size_t duplicates = 0;
    std::vector<bool> inserted_rows;  // per input row
  };
  AppendResult append_samples(std::span<const PowerSample> samples);
  /// [from, to), ascending.
  std::vector<PowerSample> samples(const std::string& channel, Timestamp from, Timestamp to) const;
  std::vector<PowerSample> samples(const std::string& channel) const;
  std::vector<std::pair<std::string, Direction>> channels() const;
  /// First and last timestamp stored for the channel.
  std::optional<std::pair<Timestamp, Timestamp>> sample_range(const std::string& channel) const;

  /// false when (device, t_start) already exists.
  bool insert_event(const UsageEvent& event);
  /// Events starting in [from, to), by device then time. Empty device = all.
  std::vector<UsageEvent> events(const std::string& device, Timestamp from, Timestamp to) const;
  std::vector<UsageEvent> events() const;

  void upsert_device(const DeviceMetadata& device);
  std::vector<DeviceMetadata> devices() const;

  void append_charge(const CreditCharge& charge);
  std::vector<CreditCharge> charges() const;

  /// Replaces the stored advice set of the user. `current` marks the ids of
  /// the latest generator run.
  void save_advices(const std::string& user_id, const std::vector<Advice>& advices,
                    const std::set<std::string>& current);
  std::vector<Advice> advices(const std::string& user_id) const;
  std::set<std::string> current_advices(const std::string& user_id) const;
  /// The log row carries the (advice_type, device_type) of the advice it targets.
  void append_feedback(const FeedbackRecord& record, AdviceType type, const std::string& device_type);
  std::vector<FeedbackRecord> feedback(const std::string& user_id) const;

  void set_meta(const std::string& key, const std::string& value);
  std::optional<std::string> meta(const std::string& key) const;

  /// Runs fn inside BEGIN/COMMIT, rolling back if it throws. Nested calls join
  /// the outer transaction.
  template <typename Fn>
  void transaction(Fn&& fn) {
    std::lock_guard lock(mutex_);
    if (depth_ > 0) {
      fn();
      return;
    }
    exec("BEGIN IMMEDIATE");
    ++depth_;
    try {
      fn();
    } catch (...) {
      --depth_;
      exec("ROLLBACK");
      throw;
    }
    --depth_;
    exec("COMMIT");
  }

 private:
  void exec(const char* sql) const;

  sqlite3* db_ = nullptr;
  mutable std::recursive_mutex mutex_;
  int depth_ = 0;
};

}  // namespace hems
