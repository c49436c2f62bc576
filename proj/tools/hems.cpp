// hems: command-line front end of the household energy engine.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "hems/analytics/savings.hpp"
#include "hems/app/engine.hpp"
#include "hems/error.hpp"
#include "hems/kernels/parallel.hpp"
#include "hems/service/api.hpp"
#include "hems/text.hpp"

namespace {

using nlohmann::json;
using namespace hems;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  json doc;
  Table table;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

std::string f4(double x) { return fmt::format("{:.4f}", x); }
std::string f12(double x) { return fmt::format("{:.12f}", x); }

struct Options {
  std::string config;
  std::string now;
  std::string out;
  std::string format = "csv";
};

class Cli {
 public:
  explicit Cli(Options o) : opt_(std::move(o)) {}

  Timestamp now() const {
    return opt_.now.empty() ? std::chrono::time_point_cast<Seconds>(std::chrono::system_clock::now())
                            : parse_iso8601(opt_.now);
  }

  std::filesystem::path config_path() const {
    if (!opt_.config.empty()) return opt_.config;
    if (const char* env = std::getenv("HEMS_CONFIG"); env && *env) return env;
    throw ValidationError("no configuration: pass --config or set HEMS_CONFIG");
  }

  bool has_config() const {
    const char* env = std::getenv("HEMS_CONFIG");
    return !opt_.config.empty() || (env && *env);
  }

  // Calculators work without a household: fall back to the shipped data.
  std::filesystem::path tariff_file() {
    return has_config() ? config().tariff_file : std::filesystem::path(HEMS_DEFAULT_DATA_DIR) / "tariff_it.txt";
  }
  std::optional<std::filesystem::path> label_file() {
    if (!has_config()) return std::filesystem::path(HEMS_DEFAULT_DATA_DIR) / "label_coefficients.txt";
    return config().label_file;
  }

  AppConfig& config() {
    if (!cfg_) cfg_ = AppConfig::load(config_path());
    return *cfg_;
  }

  HomeEngine& engine() {
    if (!engine_) engine_ = std::make_unique<HomeEngine>(config());
    return *engine_;
  }

  void emit(const Report& r) const {
    const std::string text = opt_.format == "json" ? r.doc.dump(2) + "\n" : render_csv(r.table);
    if (opt_.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(opt_.out, std::ios::binary);
      if (!f) throw Error(fmt::format("cannot write '{}'", opt_.out));
      f << text;
    }
  }

 private:
  Options opt_;
  std::optional<AppConfig> cfg_;
  std::unique_ptr<HomeEngine> engine_;
};

Report ingest_report(Cli& cli, const std::vector<std::string>& files, bool& failed) {
  Report r;
  r.doc = json::array();
  r.table.header = {"file", "rows", "samples", "inserted", "duplicates", "duplicate_rows", "malformed", "status"};
  for (const auto& f : files) {
    IngestSummary s;
    s.source = f;
    std::string status = "ok";
    try {
      s = cli.engine().ingest_file(f);
      s.source = f;
      if (!s.ok()) status = "row_errors";
    } catch (const Error& e) {
      status = fmt::format("failed: {}", e.what());
    }
    if (status != "ok") failed = true;
    r.doc.push_back({{"file", f},
                     {"rows", s.rows},
                     {"samples", s.samples},
                     {"inserted", s.inserted},
                     {"duplicates", s.duplicates},
                     {"duplicate_rows", s.duplicate_rows},
                     {"malformed", s.malformed},
                     {"reordered", s.reordered},
                     {"warnings", s.warnings},
                     {"status", status}});
    r.table.rows.push_back({f, std::to_string(s.rows), std::to_string(s.samples), std::to_string(s.inserted),
                            std::to_string(s.duplicates), std::to_string(s.duplicate_rows),
                            std::to_string(s.malformed), status});
    for (const auto& w : s.warnings) std::cerr << f << ": " << w << "\n";
  }
  return r;
}

Report detect_report(Cli& cli, const std::vector<std::string>& devices) {
  Report r;
  r.doc = json::array();
  r.table.header = {"device_id", "detected", "stored", "existing", "conflicts", "energy_kwh", "cost_eur"};
  for (const auto& s : cli.engine().detect(devices)) {
    r.doc.push_back({{"device_id", s.device_id},
                     {"detected", s.detected},
                     {"stored", s.stored},
                     {"existing", s.existing},
                     {"conflicts", s.conflicts},
                     {"energy_kwh", s.energy_kwh},
                     {"cost_eur", s.cost_eur}});
    r.table.rows.push_back({s.device_id, std::to_string(s.detected), std::to_string(s.stored),
                            std::to_string(s.existing), std::to_string(s.conflicts), f4(s.energy_kwh),
                            f4(s.cost_eur)});
  }
  return r;
}

struct AnalyzeArgs {
  std::string report;
  std::string period = "month";
  std::string month;
  std::string date;
  std::string device;
  std::string from;
  std::string to;
  int weeks = 4;
};

Report analyze_report(Cli& cli, const AnalyzeArgs& a) {
  auto& eng = cli.engine();
  const auto& tz = eng.tariff().timezone;
  const auto now = cli.now();
  Report r;

  if (a.report == "itemization") {
    const auto period = period_containing(now, parse_period_kind(a.period), tz);
    const auto entries = eng.itemization(period);
    json list = json::array();
    r.table.header = {"device_id", "energy_kwh", "cost_eur", "share"};
    for (const auto& e : entries) {
      list.push_back({{"device_id", e.device_id}, {"energy_kwh", e.energy_kwh}, {"cost_eur", e.cost_eur},
                      {"share", e.share}});
      r.table.rows.push_back({e.device_id, f4(e.energy_kwh), f4(e.cost_eur), f12(e.share)});
    }
    r.doc = {{"report", "itemization"},
             {"period", a.period},
             {"from", format_iso8601(period.from)},
             {"to", format_iso8601(period.to)},
             {"devices", list}};
    return r;
  }
  if (a.report == "slots") {
    Date first;
    if (!a.month.empty()) {
      first = parse_month(a.month);
    } else {
      const std::chrono::year_month_day ymd{tz.local_date(now)};
      first = Date{ymd.year() / ymd.month() / 1};
    }
    const auto dist = eng.slot_distribution(first);
    json list = json::array();
    r.table.header = {"device_id", "slot", "energy_kwh", "percent"};
    for (std::size_t i = 0; i < dist.devices.size(); ++i) {
      json energy = json::object(), percent = json::object();
      for (std::size_t k = 0; k < dist.slots.size(); ++k) {
        energy[dist.slots[k]] = dist.energy_kwh[i][k];
        percent[dist.slots[k]] = dist.percent[i][k];
        r.table.rows.push_back({dist.devices[i], dist.slots[k], f4(dist.energy_kwh[i][k]), f4(dist.percent[i][k])});
      }
      list.push_back({{"device_id", dist.devices[i]}, {"energy_kwh", energy}, {"percent", percent}});
    }
    r.doc = {{"report", "slots"}, {"month", format_date(first).substr(0, 7)}, {"slots", dist.slots}, {"devices", list}};
    return r;
  }
  if (a.report == "estimate") {
    const auto e = eng.estimate_today(now);
    r.doc = {{"report", "estimate"},
             {"now", format_iso8601(e.now)},
             {"consumption_so_far_kwh", e.consumption_so_far_kwh},
             {"consumption_kwh", e.consumption_kwh}};
    r.doc["production_so_far_kwh"] = e.production_so_far_kwh ? json(*e.production_so_far_kwh) : json(nullptr);
    r.doc["production_kwh"] = e.production_kwh ? json(*e.production_kwh) : json(nullptr);
    auto opt = [](const std::optional<double>& v) { return v ? f4(*v) : std::string{}; };
    r.table.header = {"now", "consumption_so_far_kwh", "consumption_kwh", "production_so_far_kwh", "production_kwh"};
    r.table.rows.push_back({format_iso8601(e.now), f4(e.consumption_so_far_kwh), f4(e.consumption_kwh),
                            opt(e.production_so_far_kwh), opt(e.production_kwh)});
    return r;
  }
  if (a.report == "usage") {
    if (a.device.empty()) throw ValidationError("usage report needs --device");
    const auto u = eng.usage_model(a.device, now, a.weeks);
    r.doc = {{"report", "usage"},
             {"device_id", u.device_id},
             {"weeks", a.weeks},
             {"event_count", u.event_count},
             {"events_per_week", u.events_per_week},
             {"mean_event_kwh", u.mean_event_kwh},
             {"start_hour_histogram", u.start_hour_histogram}};
    r.table.header = {"device_id", "event_count", "events_per_week", "mean_event_kwh"};
    std::vector<std::string> row{u.device_id, std::to_string(u.event_count), f4(u.events_per_week),
                                 f4(u.mean_event_kwh)};
    for (int h = 0; h < 24; ++h) {
      r.table.header.push_back(fmt::format("h{:02}", h));
      row.push_back(std::to_string(u.start_hour_histogram[h]));
    }
    r.table.rows.push_back(std::move(row));
    return r;
  }
  if (a.report == "summary") {
    const Date day = a.date.empty() ? tz.local_date(now) : parse_date(a.date);
    const auto s = eng.summary_day(day);
    r.doc = {{"report", "summary"},
             {"date", format_date(s.date)},
             {"consumption_kwh", s.consumption_kwh},
             {"monitored_kwh", s.monitored_kwh},
             {"production_kwh", s.production_kwh},
             {"cost_eur", s.cost_eur}};
    r.table.header = {"date", "consumption_kwh", "monitored_kwh", "production_kwh", "cost_eur"};
    r.table.rows.push_back({format_date(s.date), f4(s.consumption_kwh), f4(s.monitored_kwh), f4(s.production_kwh),
                            f4(s.cost_eur)});
    return r;
  }
  if (a.report == "events") {
    const auto from = a.from.empty() ? Timestamp::min() : parse_iso8601(a.from);
    const auto to = a.to.empty() ? Timestamp::max() : parse_iso8601(a.to);
    r.doc = json::array();
    r.table.header = {"device_id", "t_start", "duration_s", "energy_kwh", "cost_eur"};
    for (const auto& e : eng.events(a.device, from, to)) {
      json j{{"device_id", e.device_id},
             {"t_start", format_iso8601(e.t_start)},
             {"duration_s", e.duration.count()},
             {"energy_kwh", e.energy_kwh}};
      j["cost_eur"] = e.cost_eur ? json(*e.cost_eur) : json(nullptr);
      r.doc.push_back(std::move(j));
      r.table.rows.push_back({e.device_id, format_iso8601(e.t_start), std::to_string(e.duration.count()),
                              f4(e.energy_kwh), e.cost_eur ? f4(*e.cost_eur) : std::string{}});
    }
    return r;
  }
  if (a.report == "category") {
    const auto c = eng.category_assignment();
    r.doc = {{"report", "category"},
             {"household_id", c.household_id},
             {"category_id", c.category_id},
             {"basis_kwh_year", c.basis_kwh_year},
             {"method", std::string{to_string(c.method)}}};
    r.table.header = {"household_id", "category_id", "basis_kwh_year", "method"};
    r.table.rows.push_back({c.household_id, c.category_id, f4(c.basis_kwh_year), std::string{to_string(c.method)}});
    return r;
  }
  throw ValidationError(fmt::format("unknown report '{}'", a.report));
}

Report advice_report(const std::string& user, std::uint64_t seed, const std::vector<AdviceView>& list) {
  Report r;
  json arr = json::array();
  r.table.header = {"seed", "rank", "advice_id", "advice_type", "device_type", "device_id", "score", "saving_eur",
                    "message"};
  std::size_t rank = 0;
  for (const auto& v : list) {
    const auto& a = v.advice;
    ++rank;
    arr.push_back({{"rank", rank},
                   {"advice_id", a.advice_id},
                   {"advice_type", std::string{to_string(a.type)}},
                   {"device_type", a.device_type},
                   {"device_id", a.device_id},
                   {"score", a.score},
                   {"saving_eur", a.saving_eur},
                   {"params", a.params},
                   {"message", v.message}});
    r.table.rows.push_back({std::to_string(seed), std::to_string(rank), a.advice_id, std::string{to_string(a.type)},
                            a.device_type, a.device_id, std::to_string(a.score), f4(a.saving_eur), v.message});
  }
  r.doc = {{"user_id", user}, {"seed", seed}, {"advices", arr}};
  return r;
}

std::vector<FeedbackRecord> load_feedback(const std::string& path, const std::string& user, Timestamp now) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("feedback file '{}': {}", path, e.what()));
  }
  if (j.is_object() && j.contains("feedback")) j = j.at("feedback");
  if (!j.is_array()) throw ParseError("feedback file must hold an array of records");
  std::vector<FeedbackRecord> out;
  for (const auto& item : j) {
    FeedbackRecord r;
    r.user_id = item.value("user_id", user);
    r.advice_id = item.at("advice_id").get<std::string>();
    r.action = parse_feedback_action(item.at("action").get<std::string>());
    if (item.contains("cause") && !item.at("cause").is_null()) {
      r.cause = parse_reject_cause(item.at("cause").get<std::string>());
    }
    r.time = item.contains("time") ? parse_iso8601(item.at("time").get<std::string>()) : now;
    r.validate();
    out.push_back(std::move(r));
  }
  return out;
}

struct SavingsArgs {
  std::string calc;
  std::string tariff;
  std::string labels;
  double power_w = 0.0;
  std::optional<double> weekday_hours;
  std::optional<double> weekend_hours;
  double rate_a = 0, energy_a = 0, rate_b = 0, energy_b = 0;
  std::vector<double> measured_w;
  std::optional<double> target_kwh;
  double eei = 0, volume = 0;
  int label_category = 0, count = 1;
  double l_kwh = 0;
  std::string from_slot, to_slot, category;
};

Report savings_report(Cli& cli, const SavingsArgs& a) {
  Report r;
  if (a.calc == "standby") {
    StandbySchedule sched = StandbySchedule::always();
    if (a.weekday_hours || a.weekend_hours) {
      sched = StandbySchedule::weekly(a.weekday_hours.value_or(24.0), a.weekend_hours.value_or(24.0));
    }
    const double kwh = standby_annual_kwh(a.power_w, sched);
    r.doc = {{"calc", "standby"}, {"power_w", a.power_w}, {"hours_per_year", sched.hours_per_year()},
             {"kwh_year", kwh}};
    r.table = {{"calc", "power_w", "hours_per_year", "kwh_year"},
               {{"standby", f4(a.power_w), f4(sched.hours_per_year()), f4(kwh)}}};
    return r;
  }
  if (a.calc == "swap") {
    const auto s = swap_savings({{"a", a.rate_a, 0.0}, a.energy_a}, {{"b", a.rate_b, 0.0}, a.energy_b});
    r.doc = {{"calc", "swap"}, {"hours_a", s.hours_a}, {"hours_b", s.hours_b}, {"savings_fraction", s.savings_fraction}};
    r.table = {{"calc", "hours_a", "hours_b", "savings_fraction"},
               {{"swap", f4(s.hours_a), f4(s.hours_b), f4(s.savings_fraction)}}};
    return r;
  }
  if (a.calc == "replacement") {
    ReplacementTarget target;
    target.annual_kwh = a.target_kwh;
    target.eei = a.eei;
    target.volume_l = a.volume;
    target.category = a.label_category;
    target.count = a.count;
    std::optional<LabelModel> labels;
    if (!a.target_kwh) {
      std::filesystem::path p = a.labels;
      if (p.empty()) {
        const auto f = cli.label_file();
        if (!f) throw ValidationError("label model needs --labels or label_file in config");
        p = *f;
      }
      labels = LabelModel::load(p);
    }
    const auto e = replacement_annual_kwh(a.measured_w, target, labels ? &*labels : nullptr);
    r.doc = {{"calc", "replacement"},
             {"old_kwh_year", e.old_kwh_year},
             {"old_kwh_month", e.old_kwh_month},
             {"new_kwh_year", e.new_kwh_year},
             {"monthly_saving_kwh", e.monthly_saving_kwh}};
    r.table = {{"calc", "old_kwh_year", "old_kwh_month", "new_kwh_year", "monthly_saving_kwh"},
               {{"replacement", f4(e.old_kwh_year), f4(e.old_kwh_month), f4(e.new_kwh_year),
                 f4(e.monthly_saving_kwh)}}};
    return r;
  }
  if (a.calc == "shift") {
    const auto scheme = TariffScheme::load(a.tariff.empty() ? cli.tariff_file() : std::filesystem::path(a.tariff));
    const double s = shift_savings(a.l_kwh, a.from_slot, a.to_slot, a.category, scheme);
    r.doc = {{"calc", "shift"}, {"l_kwh", a.l_kwh},          {"from", a.from_slot},
             {"to", a.to_slot}, {"category", a.category}, {"saving_eur", s}};
    r.table = {{"calc", "l_kwh", "from", "to", "category", "saving_eur"},
               {{"shift", f4(a.l_kwh), a.from_slot, a.to_slot, a.category, f4(s)}}};
    return r;
  }
  throw ValidationError(fmt::format("unknown calculator '{}'", a.calc));
}

struct TariffArgs {
  std::string tariff;
  std::string input;
  std::vector<std::string> timestamps;
  std::vector<double> kwh;
  std::vector<std::string> items;  // kwh:slot:category
};

Report tariff_report(Cli& cli, const std::string& op, const TariffArgs& a) {
  Report r;
  const auto tariff_path = a.tariff.empty() ? cli.tariff_file() : std::filesystem::path(a.tariff);
  if (op == "classify") {
    TariffContext ctx{TariffScheme::load(tariff_path), HolidayCalendar::load(cli.config().holiday_file),
                      Timezone::from_name(cli.config().timezone)};
    std::vector<std::string> raw = a.timestamps;
    std::string text;
    if (!a.input.empty()) {
      text = read_file(a.input);
      for (auto line : split_lines(text)) {
        line = strip_comment(line);
        if (!line.empty()) raw.emplace_back(line);
      }
    }
    std::vector<Timestamp> ts;
    ts.reserve(raw.size());
    for (const auto& t : raw) ts.push_back(parse_iso8601(t));
    std::vector<std::uint8_t> slots(ts.size());
    kernels::classify_slots(ts, ctx, slots);
    r.doc = json::array();
    r.table.header = {"timestamp", "slot"};
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto& id = ctx.scheme.slots()[slots[i]];
      r.doc.push_back({{"timestamp", format_iso8601(ts[i])}, {"slot", id}});
      r.table.rows.push_back({format_iso8601(ts[i]), id});
    }
    return r;
  }
  const auto scheme = TariffScheme::load(tariff_path);
  if (op == "category") {
    r.doc = json::array();
    r.table.header = {"kwh_year", "category"};
    for (double k : a.kwh) {
      const auto& c = determine_category(k, scheme);
      r.doc.push_back({{"kwh_year", k}, {"category", c}});
      r.table.rows.push_back({fmt::format("{}", k), c});
    }
    return r;
  }
  if (op == "cost") {
    json items = json::array();
    r.table.header = {"kwh", "slot", "category", "price_eur_kwh", "cost_eur"};
    double total = 0.0;
    for (const auto& item : a.items) {
      const auto parts = split(item, ':');
      double kwh = 0.0;
      if (parts.size() != 3 || !parse_double(parts[0], kwh)) {
        throw ValidationError(fmt::format("--item expects kwh:slot:category, got '{}'", item));
      }
      const double price = price_per_kwh(parts[1], parts[2], scheme);
      const double cost = cost_of_energy(kwh, parts[1], parts[2], scheme);
      total += cost;
      items.push_back({{"kwh", kwh}, {"slot", std::string(parts[1])}, {"category", std::string(parts[2])},
                       {"price_eur_kwh", price}, {"cost_eur", cost}});
      r.table.rows.push_back({f4(kwh), std::string(parts[1]), std::string(parts[2]), fmt::format("{:.6f}", price),
                              f4(cost)});
    }
    r.table.rows.push_back({"", "", "", "total", f4(total)});
    r.doc = {{"items", items}, {"total_eur", total}};
    return r;
  }
  throw ValidationError(fmt::format("unknown tariff operation '{}'", op));
}

ApiService* g_service = nullptr;
extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Household energy monitoring, pricing and advice"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config, "Household config file (default: $HEMS_CONFIG)");
  app.add_option("--now", opt.now, "Clock override, ISO-8601");
  app.add_option("--out", opt.out, "Write the report here instead of stdout");
  app.add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

  std::vector<std::string> files;
  auto* ingest = app.add_subcommand("ingest", "Load CSV trace files");
  ingest->add_option("files", files, "Trace files")->required();

  std::vector<std::string> detect_devices;
  auto* detect = app.add_subcommand("detect", "Detect, price and store usage events");
  detect->add_option("--device", detect_devices, "Device id (repeatable; default all)");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Reports over stored data");
  analyze->add_option("--report", an.report, "Report kind")
      ->required()
      ->check(CLI::IsMember({"itemization", "slots", "estimate", "usage", "summary", "events", "category"}));
  analyze->add_option("--period", an.period, "itemization period")->check(CLI::IsMember({"day", "week", "month", "year"}));
  analyze->add_option("--month", an.month, "slots month, YYYY-MM");
  analyze->add_option("--date", an.date, "summary date, YYYY-MM-DD");
  analyze->add_option("--device", an.device, "usage/events device");
  analyze->add_option("--from", an.from, "events lower bound, ISO-8601");
  analyze->add_option("--to", an.to, "events upper bound, ISO-8601");
  analyze->add_option("--weeks", an.weeks, "usage window in weeks");

  std::string feedback_file, user;
  auto* advise = app.add_subcommand("advise", "Generate and rank advices");
  advise->add_option("--apply-feedback", feedback_file, "JSON array of feedback records");
  advise->add_option("--user", user, "User id (default from config)");

  SavingsArgs sv;
  auto* savings = app.add_subcommand("savings", "Stand-alone savings calculators");
  savings->add_option("--calc", sv.calc, "Calculator")->required()->check(CLI::IsMember({"standby", "swap", "replacement", "shift"}));
  savings->add_option("--tariff", sv.tariff, "Tariff file (default from config, else shipped data)");
  savings->add_option("--labels", sv.labels, "Label coefficient file (default from config, else shipped data)");
  savings->add_option("--power-w", sv.power_w, "standby: standby power");
  savings->add_option("--weekday-hours", sv.weekday_hours, "standby: powered hours per weekday");
  savings->add_option("--weekend-hours", sv.weekend_hours, "standby: powered hours per weekend day");
  savings->add_option("--rate-a", sv.rate_a, "swap: Wh per hour of activity, device A");
  savings->add_option("--energy-a", sv.energy_a, "swap: kWh, device A");
  savings->add_option("--rate-b", sv.rate_b, "swap: Wh per hour of activity, device B");
  savings->add_option("--energy-b", sv.energy_b, "swap: kWh, device B");
  savings->add_option("--measured-w", sv.measured_w, "replacement: measured mean power (repeatable)")->delimiter(',');
  savings->add_option("--target-kwh", sv.target_kwh, "replacement: new annual consumption");
  savings->add_option("--eei", sv.eei, "replacement: label EEI");
  savings->add_option("--volume", sv.volume, "replacement: volume in litres");
  savings->add_option("--label-category", sv.label_category, "replacement: label category");
  savings->add_option("--count", sv.count, "replacement: number of new units");
  savings->add_option("--l", sv.l_kwh, "shift: kWh moved");
  savings->add_option("--from", sv.from_slot, "shift: expensive slot");
  savings->add_option("--to", sv.to_slot, "shift: cheap slot");
  savings->add_option("--category", sv.category, "shift: consumption category");

  std::string listen = "127.0.0.1:8080";
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--listen", listen, "host:port");

  TariffArgs ta;
  std::string tariff_op;
  auto* tariff = app.add_subcommand("tariff", "Slot classification, categories and energy pricing");
  tariff->add_option("operation", tariff_op, "classify | category | cost")
      ->required()
      ->check(CLI::IsMember({"classify", "category", "cost"}));
  tariff->add_option("--tariff", ta.tariff, "Tariff file (default from config, else shipped data)");
  tariff->add_option("--input", ta.input, "classify: file with one timestamp per line");
  tariff->add_option("--at", ta.timestamps, "classify: timestamp (repeatable)");
  tariff->add_option("--kwh", ta.kwh, "category: annual kWh (repeatable)");
  tariff->add_option("--item", ta.items, "cost: kwh:slot:category (repeatable)");

  std::vector<std::string> fleet_configs;
  auto* fleet = app.add_subcommand("fleet", "Per-type statistics over several households");
  fleet->add_option("configs", fleet_configs, "Household config files")->required();

  CLI11_PARSE(app, argc, argv);

  Cli cli(opt);
  try {
    if (*ingest) {
      bool failed = false;
      cli.emit(ingest_report(cli, files, failed));
      return failed ? 1 : 0;
    }
    if (*detect) {
      cli.emit(detect_report(cli, detect_devices));
      return 0;
    }
    if (*analyze) {
      cli.emit(analyze_report(cli, an));
      return 0;
    }
    if (*advise) {
      auto& eng = cli.engine();
      const auto who = user.empty() ? eng.config().default_user : user;
      const auto now = cli.now();
      auto list = eng.advise(who, now);
      if (!feedback_file.empty()) {
        for (const auto& rec : load_feedback(feedback_file, who, now)) eng.feedback(rec);
        list = eng.active_advices(who);
      }
      cli.emit(advice_report(who, eng.config().advisor.rng_seed, list));
      return 0;
    }
    if (*savings) {
      cli.emit(savings_report(cli, sv));
      return 0;
    }
    if (*tariff) {
      cli.emit(tariff_report(cli, tariff_op, ta));
      return 0;
    }
    if (*serve) {
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw ValidationError("--listen expects host:port");
      const int port = std::stoi(listen.substr(colon + 1));
      auto& eng = cli.engine();
      const bool fixed = !opt.now.empty();
      const auto pinned = fixed ? cli.now() : Timestamp{};
      ApiService service(eng, [fixed, pinned] {
        return fixed ? pinned : std::chrono::time_point_cast<Seconds>(std::chrono::system_clock::now());
      });
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << listen << "\n";
      service.serve(listen.substr(0, colon), port);
      g_service = nullptr;
      return 0;
    }
    if (*fleet) {
      std::vector<DeviceProfile> all;
      const auto now = cli.now();
      for (const auto& path : fleet_configs) {
        HomeEngine eng(AppConfig::load(path));
        auto p = eng.profiles(now);
        all.insert(all.end(), p.begin(), p.end());
      }
      const auto text = fleet_statistics_json(FleetStatistics::compute(all));
      if (opt.out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(opt.out, std::ios::binary) << text;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
