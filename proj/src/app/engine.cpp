#include "hems/app/engine.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "hems/detect/detector.hpp"
#include "hems/error.hpp"
#include "hems/ingest/trace.hpp"
#include "hems/kernels/parallel.hpp"
#include "hems/text.hpp"

namespace hems {
namespace {

using std::chrono::days;
constexpr Seconds kLookback{3600};  // samples fetched before a window so its first reading is held in
constexpr days kProfileWindow{30};
constexpr int kEstimateHistoryDays = 14;

// Stored events of one device are sorted by t_start and never overlap.
bool overlaps_any(const std::vector<UsageEvent>& sorted, const UsageEvent& e) {
  auto it = std::upper_bound(sorted.begin(), sorted.end(), e.t_start,
                             [](Timestamp t, const UsageEvent& s) { return t < s.t_start; });
  if (it != sorted.end() && it->t_start < e.t_end()) return true;
  if (it != sorted.begin() && std::prev(it)->t_end() > e.t_start) return true;
  return false;
}

bool has_start(const std::vector<UsageEvent>& sorted, Timestamp t) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), t,
                             [](const UsageEvent& s, Timestamp v) { return s.t_start < v; });
  return it != sorted.end() && it->t_start == t;
}

}  // namespace

FleetStatistics load_fleet_statistics(const std::filesystem::path& path) {
  FleetStatistics fleet;
  try {
    auto j = nlohmann::json::parse(read_file(path));
    for (const auto& [type, v] : j.at("types").items()) {
      TypeStatistics s;
      s.mean_power_w = v.at("mean_power_w").get<double>();
      s.devices = v.value("devices", std::size_t{0});
      if (v.contains("mean_monthly_runs") && !v.at("mean_monthly_runs").is_null()) {
        s.mean_monthly_runs = v.at("mean_monthly_runs").get<double>();
      }
      fleet.types.emplace(type, s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("fleet statistics '{}': {}", path.string(), e.what()));
  }
  return fleet;
}

std::string fleet_statistics_json(const FleetStatistics& fleet) {
  nlohmann::json types = nlohmann::json::object();
  for (const auto& [type, s] : fleet.types) {
    nlohmann::json v{{"mean_power_w", s.mean_power_w}, {"devices", s.devices}};
    v["mean_monthly_runs"] = s.mean_monthly_runs ? nlohmann::json(*s.mean_monthly_runs) : nlohmann::json(nullptr);
    types[type] = v;
  }
  return nlohmann::json{{"types", types}}.dump(2) + "\n";
}

HomeEngine::HomeEngine(AppConfig config)
    : cfg_(std::move(config)),
      ctx_{TariffScheme::load(cfg_.tariff_file), HolidayCalendar::load(cfg_.holiday_file),
           Timezone::from_name(cfg_.timezone)},
      registry_(Vocabulary::load(cfg_.device_types_file), Vocabulary::load(cfg_.rooms_file)) {
  if (cfg_.category != "auto") ctx_.scheme.category_index(cfg_.category);
  if (cfg_.templates_file) templates_ = MessageTemplates::load(*cfg_.templates_file);

  store_ = std::make_unique<Store>(cfg_.database());
  if (auto owner = store_->meta("household_id"); owner && *owner != cfg_.household_id) {
    throw ConflictError(fmt::format("data directory belongs to household '{}'", *owner));
  }
  store_->set_meta("household_id", cfg_.household_id);

  registry_.restore(store_->devices(), store_->charges());
  for (const auto& d : cfg_.devices) {
    if (registry_.find(d.device_id)) continue;
    registry_.register_device(d);
    store_->upsert_device(d);
  }
}

IngestSummary HomeEngine::ingest_trace(std::string_view text, const std::string& source) {
  TraceParseOptions opts;
  opts.directions = cfg_.directions;
  auto parsed = parse_trace(text, opts);
  IngestSummary s;
  s.source = source;
  s.rows = parsed.rows;
  s.samples = parsed.samples.size();
  s.malformed = parsed.malformed_rows;
  s.duplicate_rows = parsed.duplicate_rows;
  s.reordered = parsed.reordered;
  s.warnings = std::move(parsed.warnings);
  auto appended = append_samples(parsed.samples);
  s.inserted = appended.inserted;
  s.duplicates = appended.duplicates;
  return s;
}

IngestSummary HomeEngine::ingest_file(const std::filesystem::path& path) {
  return ingest_trace(read_file(path), path.filename().string());
}

Store::AppendResult HomeEngine::append_samples(std::span<const PowerSample> samples) {
  std::lock_guard lock(write_mutex_);
  return store_->append_samples(samples);
}

std::string HomeEngine::category_id() const {
  if (cfg_.category != "auto") return cfg_.category;
  return category_assignment().category_id;
}

CategoryAssignment HomeEngine::category_assignment() const {
  if (cfg_.category != "auto") return assign_category_manual(cfg_.household_id, cfg_.category, ctx_.scheme);

  const auto channels = consumption_channels();
  std::optional<Timestamp> first, last;
  for (const auto& ch : channels) {
    if (auto r = store_->sample_range(ch)) {
      first = first ? std::min(*first, r->first) : r->first;
      last = last ? std::max(*last, r->second) : r->second;
    }
  }
  if (!first) {
    return {cfg_.household_id, ctx_.scheme.categories().front().id, 0.0, CategoryMethod::annualized_projection};
  }
  const Date d0 = ctx_.timezone.local_date(*first);
  const Date d1 = ctx_.timezone.local_date(*last);
  auto cover = coverages(channels, ctx_.timezone.start_of_day(d0), ctx_.timezone.start_of_day(d1 + days{1}));
  std::vector<double> daily;
  for (Date d = d0; d <= d1; d += days{1}) {
    const auto from = ctx_.timezone.start_of_day(d);
    const auto to = ctx_.timezone.start_of_day(d + days{1});
    double kwh = 0.0;
    Seconds seen{0};
    for (const auto& c : cover) {
      kwh += integrate_kwh(c, from, to);
      seen += observed_seconds(c, from, to);
    }
    if (seen > Seconds{0}) daily.push_back(kwh);
  }
  return assign_category(cfg_.household_id, daily, ctx_.scheme);
}

void HomeEngine::store_event(const UsageEvent& priced) {
  store_->transaction([&] {
    if (!store_->insert_event(priced)) throw ConflictError(fmt::format("event {} already stored", priced.key()));
    registry_.apply_event_to_credit(priced.device_id, priced);
    store_->append_charge(registry_.charges().back());
    store_->upsert_device(*registry_.find(priced.device_id));
  });
}

std::vector<DetectSummary> HomeEngine::detect(const std::vector<std::string>& device_ids) {
  std::lock_guard lock(write_mutex_);
  std::vector<std::string> ids = device_ids;
  if (ids.empty()) {
    for (const auto& d : registry_.list()) ids.push_back(d.device_id);
  }
  for (const auto& id : ids) {
    if (!registry_.find(id)) throw NotFoundError(fmt::format("unknown device '{}'", id));
  }

  std::vector<std::vector<PowerSample>> data(ids.size());
  std::vector<kernels::DeviceTrace> traces;
  traces.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    data[i] = store_->samples(ids[i]);
    traces.push_back({data[i], cfg_.detector.for_device(ids[i])});
  }
  auto found = kernels::detect_all(traces);
  const auto category = category_id();

  std::vector<DetectSummary> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    DetectSummary s;
    s.device_id = ids[i];
    s.detected = found[i].size();
    const auto existing = store_->events(ids[i], Timestamp::min(), Timestamp::max());
    std::vector<UsageEvent> fresh;
    for (auto& e : found[i]) {
      if (has_start(existing, e.t_start)) ++s.existing;
      else if (overlaps_any(existing, e)) ++s.conflicts;
      else fresh.push_back(std::move(e));
    }
    kernels::price_events(fresh, ctx_, category);
    for (const auto& e : fresh) {
      store_event(e);
      ++s.stored;
      s.energy_kwh += e.energy_kwh;
      s.cost_eur += *e.cost_eur;
    }
    out.push_back(std::move(s));
  }
  return out;
}

bool HomeEngine::add_event(UsageEvent event) {
  if (event.duration <= Seconds{0}) throw ValidationError("event duration must be positive");
  if (!(event.energy_kwh > 0.0)) throw ValidationError("event energy must be positive");
  if (!registry_.find(event.device_id)) throw NotFoundError(fmt::format("unknown device '{}'", event.device_id));

  std::lock_guard lock(write_mutex_);
  const auto existing = store_->events(event.device_id, Timestamp::min(), Timestamp::max());
  if (has_start(existing, event.t_start)) return false;
  if (overlaps_any(existing, event)) {
    throw ConflictError(fmt::format("event {} overlaps a stored event", event.key()));
  }
  event.cost_eur = cost_of_event(event, ctx_, category_id());
  store_event(event);
  return true;
}

std::vector<UsageEvent> HomeEngine::events(const std::string& device_id, Timestamp from, Timestamp to) const {
  return store_->events(device_id, from, to);
}

std::string HomeEngine::register_device(const DeviceMetadata& device) {
  std::lock_guard lock(write_mutex_);
  auto id = registry_.register_device(device);
  store_->upsert_device(*registry_.find(id));
  return id;
}

void HomeEngine::update_device(const DeviceMetadata& device) {
  std::lock_guard lock(write_mutex_);
  registry_.update_device(device);
  store_->upsert_device(*registry_.find(device.device_id));
}

std::vector<std::string> HomeEngine::consumption_channels() const {
  if (!cfg_.aggregate_channel.empty()) return {cfg_.aggregate_channel};
  std::vector<std::string> out;
  for (const auto& d : registry_.list()) out.push_back(d.device_id);
  return out;
}

std::vector<std::string> HomeEngine::production_channels() const {
  std::vector<std::string> out;
  for (const auto& [ch, dir] : store_->channels()) {
    if (dir == Direction::production) out.push_back(ch);
  }
  return out;
}

std::vector<std::vector<Coverage>> HomeEngine::coverages(const std::vector<std::string>& channels, Timestamp from,
                                                         Timestamp to) const {
  std::vector<std::vector<Coverage>> out;
  out.reserve(channels.size());
  for (const auto& ch : channels) {
    const auto samples = store_->samples(ch, from - kLookback, to);
    out.push_back(coverage(samples, cfg_.detector.for_device(ch).gaps));
  }
  return out;
}

DaySummary HomeEngine::summary_day(Date day) const {
  const auto from = ctx_.timezone.start_of_day(day);
  const auto to = ctx_.timezone.start_of_day(day + days{1});
  const auto cat = ctx_.scheme.category_index(category_id());
  const auto runs = slot_runs(from, to, ctx_);

  DaySummary s;
  s.date = day;
  for (const auto& c : coverages(consumption_channels(), from, to)) {
    for (const auto& r : runs) {
      const double kwh = integrate_kwh(c, r.from, r.to);
      s.consumption_kwh += kwh;
      s.cost_eur += kwh * ctx_.scheme.price(r.slot, cat);
    }
  }
  if (cfg_.aggregate_channel.empty()) {
    s.monitored_kwh = s.consumption_kwh;
  } else {
    std::vector<std::string> ids;
    for (const auto& d : registry_.list()) ids.push_back(d.device_id);
    for (const auto& c : coverages(ids, from, to)) s.monitored_kwh += integrate_kwh(c, from, to);
  }
  for (const auto& c : coverages(production_channels(), from, to)) s.production_kwh += integrate_kwh(c, from, to);
  return s;
}

std::vector<ItemizationEntry> HomeEngine::itemization(Period period) const {
  const auto evs = store_->events("", period.from, period.to);
  return itemize(evs, period);
}

TodayEstimate HomeEngine::estimate_today(Timestamp now) const {
  const auto& tz = ctx_.timezone;
  const Date today = tz.local_date(now);
  const Seconds since = now - tz.start_of_day(today);
  const Timestamp hist_from = tz.start_of_day(today - days{kEstimateHistoryDays});

  auto run = [&](const std::vector<std::string>& channels) {
    auto cover = coverages(channels, hist_from, now);
    std::vector<DayProfile> history;
    for (int k = kEstimateHistoryDays; k >= 1; --k) history.push_back(build_day_profile(cover, today - days{k}, tz));
    const double cum = build_day_profile(cover, today, tz).at(since);
    return std::make_pair(cum, hems::estimate_today(history, cum, since));
  };

  TodayEstimate e;
  e.now = now;
  std::tie(e.consumption_so_far_kwh, e.consumption_kwh) = run(consumption_channels());
  if (auto prod = production_channels(); !prod.empty()) {
    try {
      auto [cum, est] = run(prod);
      e.production_so_far_kwh = cum;
      e.production_kwh = est;
    } catch (const ValidationError&) {
      // production history too thin; consumption still reported
    }
  }
  return e;
}

SlotDistribution HomeEngine::slot_distribution(Date month_first_day) const {
  const auto period = month_period(month_first_day, ctx_.timezone);
  const auto evs = store_->events("", period.from, period.to);
  return hems::slot_distribution(evs, ctx_);
}

UsageModel HomeEngine::usage_model(const std::string& device_id, Timestamp now, int weeks) const {
  if (weeks <= 0) throw ValidationError("weeks must be positive");
  auto dev = registry_.find(device_id);
  if (!dev) throw NotFoundError(fmt::format("unknown device '{}'", device_id));
  const Period window{now - days{7 * weeks}, now};
  const auto evs = store_->events(device_id, window.from, window.to);
  return build_usage_model(evs, *dev, window, ctx_.timezone);
}

std::vector<DeviceProfile> HomeEngine::profiles(Timestamp now) const {
  const auto month = period_containing(now, PeriodKind::month, ctx_.timezone);
  const Timestamp month_end = std::min(month.to, now);
  const Timestamp window_from = now - kProfileWindow;

  std::vector<DeviceProfile> out;
  for (const auto& dev : registry_.list()) {
    DeviceProfile p;
    p.device = dev;
    const auto& det = cfg_.detector.for_device(dev.device_id);
    const auto samples = store_->samples(dev.device_id, window_from - kLookback, now);
    const auto cover = coverage(samples, det.gaps);
    p.mean_power_w = mean_power_w(cover, window_from, now);
    std::vector<PowerSample> in_window;
    for (const auto& s : samples) {
      if (s.timestamp >= window_from) in_window.push_back(s);
    }
    p.standby_power_w = estimate_standby_power(in_window, det);

    p.month_slot_kwh.assign(ctx_.scheme.slots().size(), 0.0);
    for (const auto& e : store_->events(dev.device_id, month.from, month_end)) {
      ++p.runs_month;
      p.month_kwh += e.energy_kwh;
      p.month_cost_eur += e.cost_eur.value_or(0.0);
      const auto split = event_slot_energy(e, ctx_);
      for (std::size_t k = 0; k < split.size(); ++k) p.month_slot_kwh[k] += split[k];
    }
    if (p.runs_month) p.mean_event_kwh = p.month_kwh / static_cast<double>(p.runs_month);
    out.push_back(std::move(p));
  }
  return out;
}

double HomeEngine::unit_price(std::span<const DeviceProfile> profiles) const {
  double kwh = 0.0, eur = 0.0;
  for (const auto& p : profiles) {
    kwh += p.month_kwh;
    eur += p.month_cost_eur;
  }
  if (kwh > 0.0) return eur / kwh;
  return time_weighted_price(ctx_, category_id());
}

std::string HomeEngine::render(const Advice& advice) const {
  return templates_ ? templates_->render(advice) : std::string{};
}

std::vector<AdviceView> HomeEngine::advise(const std::string& user_id, Timestamp now) {
  std::lock_guard lock(write_mutex_);
  const auto profs = profiles(now);
  const auto fleet = cfg_.fleet_stats_file ? load_fleet_statistics(*cfg_.fleet_stats_file)
                                           : FleetStatistics::compute(profs);
  const double unit = unit_price(profs);
  const auto category = category_id();

  std::vector<Advice> candidates;
  auto append = [&](std::vector<Advice> more) {
    candidates.insert(candidates.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  append(generate_diagnostics(user_id, profs, fleet, cfg_.advisor, unit));
  append(generate_shifting(user_id, profs, ctx_, category, cfg_.advisor));
  append(generate_standby(user_id, profs, unit));
  append(generate_curtailment(user_id, profs, fleet));

  AdviceBook book(user_id);
  book.restore(store_->advices(user_id), store_->feedback(user_id), store_->current_advices(user_id));
  book.merge(candidates);
  store_->save_advices(user_id, book.all(), book.current());

  std::vector<AdviceView> out;
  for (auto& a : book.active(cfg_.advisor.max_displayed, cfg_.advisor.rng_seed)) {
    auto msg = render(a);
    out.push_back({std::move(a), std::move(msg)});
  }
  return out;
}

std::vector<AdviceView> HomeEngine::active_advices(const std::string& user_id) const {
  AdviceBook book(user_id);
  book.restore(store_->advices(user_id), {}, store_->current_advices(user_id));
  std::vector<AdviceView> out;
  for (auto& a : book.active(cfg_.advisor.max_displayed, cfg_.advisor.rng_seed)) {
    auto msg = render(a);
    out.push_back({std::move(a), std::move(msg)});
  }
  return out;
}

Advice HomeEngine::feedback(const FeedbackRecord& record) {
  record.validate();
  std::lock_guard lock(write_mutex_);
  AdviceBook book(record.user_id);
  book.restore(store_->advices(record.user_id), store_->feedback(record.user_id),
               store_->current_advices(record.user_id));
  const Advice* target = book.find(record.advice_id);
  if (!target) throw NotFoundError(fmt::format("unknown advice '{}'", record.advice_id));
  const auto type = target->type;
  const auto device_type = target->device_type;
  book.apply_feedback(record);
  store_->transaction([&] {
    store_->save_advices(record.user_id, book.all(), book.current());
    store_->append_feedback(record, type, device_type);
  });
  return *book.find(record.advice_id);
}

}  // namespace hems
