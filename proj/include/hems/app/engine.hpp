#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hems/advisor/book.hpp"
#include "hems/advisor/generators.hpp"
#include "hems/advisor/templates.hpp"
#include "hems/analytics/estimate.hpp"
#include "hems/analytics/reports.hpp"
#include "hems/analytics/savings.hpp"
#include "hems/app/config.hpp"
#include "hems/core/registry.hpp"
#include "hems/store/store.hpp"
#include "hems/tariff/pricing.hpp"

namespace hems {

struct IngestSummary {
  std::string source;
  std::size_t rows = 0;
  std::size_t samples = 0;
  std::size_t inserted = 0;
  std::size_t duplicates = 0;      // already stored
  std::size_t duplicate_rows = 0;  // repeated timestamps inside the file
  std::size_t malformed = 0;
  bool reordered = false;
  std::vector<std::string> warnings;
  bool ok() const { return malformed == 0; }
};

struct DetectSummary {
  std::string device_id;
  std::size_t detected = 0;
  std::size_t stored = 0;
  std::size_t existing = 0;   // same identity already stored
  std::size_t conflicts = 0;  // overlap a different stored event
  double energy_kwh = 0.0;    // of newly stored events
  double cost_eur = 0.0;
};

struct DaySummary {
  Date date;
  double consumption_kwh = 0.0;  // aggregate channel when configured, else monitored
  double monitored_kwh = 0.0;    // registered device channels
  double production_kwh = 0.0;
  double cost_eur = 0.0;         // consumption priced per slot
};

struct TodayEstimate {
  Timestamp now;
  double consumption_so_far_kwh = 0.0;
  double consumption_kwh = 0.0;
  std::optional<double> production_so_far_kwh;
  std::optional<double> production_kwh;
};

struct AdviceView {
  Advice advice;
  std::string message;
};

FleetStatistics load_fleet_statistics(const std::filesystem::path& path);
std::string fleet_statistics_json(const FleetStatistics& fleet);

/// One household: its store, registry, tariff and advisor state. Writes are
/// serialized; reads may run concurrently with each other.
class HomeEngine {
 public:
  explicit HomeEngine(AppConfig config);

  const AppConfig& config() const { return cfg_; }
  const TariffContext& tariff() const { return ctx_; }
  Store& store() { return *store_; }

  IngestSummary ingest_trace(std::string_view text, const std::string& source);
  IngestSummary ingest_file(const std::filesystem::path& path);
  Store::AppendResult append_samples(std::span<const PowerSample> samples);

  /// Detects, prices, stores and charges events. Empty list = every registered device.
  std::vector<DetectSummary> detect(const std::vector<std::string>& device_ids = {});
  /// Externally supplied event. false when its identity is already stored;
  /// ConflictError when it overlaps another event of the device.
  bool add_event(UsageEvent event);
  std::vector<UsageEvent> events(const std::string& device_id, Timestamp from, Timestamp to) const;

  std::string register_device(const DeviceMetadata& device);
  void update_device(const DeviceMetadata& device);
  std::vector<DeviceMetadata> devices() const { return registry_.list(); }
  std::optional<DeviceMetadata> device(const std::string& device_id) const { return registry_.find(device_id); }

  CategoryAssignment category_assignment() const;

  DaySummary summary_day(Date day) const;
  std::vector<ItemizationEntry> itemization(Period period) const;
  TodayEstimate estimate_today(Timestamp now) const;
  SlotDistribution slot_distribution(Date month_first_day) const;
  UsageModel usage_model(const std::string& device_id, Timestamp now, int weeks = 4) const;

  std::vector<DeviceProfile> profiles(Timestamp now) const;
  /// Mean EUR/kWh of this month's priced events, or the time-weighted tariff price.
  double unit_price(std::span<const DeviceProfile> profiles) const;
  /// Runs the generators, folds them into the user's stored advice state and
  /// returns the ranked active list.
  std::vector<AdviceView> advise(const std::string& user_id, Timestamp now);
  /// The stored active list without regenerating.
  std::vector<AdviceView> active_advices(const std::string& user_id) const;
  Advice feedback(const FeedbackRecord& record);

  std::string render(const Advice& advice) const;

 private:
  std::vector<std::string> consumption_channels() const;
  std::vector<std::string> production_channels() const;
  std::vector<std::vector<Coverage>> coverages(const std::vector<std::string>& channels, Timestamp from,
                                               Timestamp to) const;
  std::string category_id() const;
  void store_event(const UsageEvent& priced);

  AppConfig cfg_;
  TariffContext ctx_;
  DeviceRegistry registry_;
  std::unique_ptr<Store> store_;
  std::optional<MessageTemplates> templates_;
  mutable std::mutex write_mutex_;
};

}  // namespace hems
