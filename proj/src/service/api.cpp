#include "hems/service/api.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "hems/error.hpp"
#include "hems/text.hpp"

namespace hems {

using nlohmann::json;

struct ApiService::Server {
  httplib::Server http;
};

namespace {

constexpr std::string_view kPrefix = "/api/v1";

double round4(double x) { return std::round(x * 1e4) / 1e4; }

struct HttpError : Error {
  HttpError(int s, const std::string& msg) : Error(msg), status(s) {}
  int status;
};

ApiResponse reply(int status, const json& body) { return {status, body.dump() + "\n"}; }

json device_json(const DeviceMetadata& d) {
  return {{"device_id", d.device_id},     {"device_type", d.device_type},
          {"room", d.room},               {"mobility", std::string{to_string(d.mobility)}},
          {"curtailable", d.curtailable}, {"user_driven", d.user_driven},
          {"has_standby", d.has_standby}, {"credit_eur", round4(d.credit.eur())}};
}

json event_json(const UsageEvent& e) {
  json j{{"device_id", e.device_id},
         {"t_start", format_iso8601(e.t_start)},
         {"t_end", format_iso8601(e.t_end())},
         {"duration_s", e.duration.count()},
         {"energy_kwh", round4(e.energy_kwh)}};
  j["cost_eur"] = e.cost_eur ? json(round4(*e.cost_eur)) : json(nullptr);
  return j;
}

json advice_json(const AdviceView& v) {
  const auto& a = v.advice;
  return {{"advice_id", a.advice_id},
          {"advice_type", std::string{to_string(a.type)}},
          {"device_type", a.device_type},
          {"device_id", a.device_id},
          {"score", a.score},
          {"enabled", a.enabled},
          {"saving_eur", round4(a.saving_eur)},
          {"params", a.params},
          {"message", v.message}};
}

Timestamp parse_time_value(const json& v) {
  if (v.is_number_integer()) return from_unix(v.get<std::int64_t>());
  if (v.is_string()) return parse_iso8601(v.get<std::string>());
  throw ValidationError("timestamp must be an ISO-8601 string or unix seconds");
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw HttpError(400, fmt::format("malformed JSON body: {}", e.what()));
  }
}

std::string query_or(const ApiRequest& r, const std::string& key, std::string fallback) {
  auto it = r.query.find(key);
  return it == r.query.end() || it->second.empty() ? fallback : it->second;
}

DeviceMetadata apply_device_fields(DeviceMetadata d, const json& j) {
  if (!j.is_object()) throw HttpError(400, "device body must be an object");
  if (j.contains("device_type")) d.device_type = j.at("device_type").get<std::string>();
  if (j.contains("room")) d.room = j.at("room").get<std::string>();
  if (j.contains("mobility")) d.mobility = parse_mobility(j.at("mobility").get<std::string>());
  if (j.contains("curtailable")) d.curtailable = j.at("curtailable").get<bool>();
  if (j.contains("user_driven")) d.user_driven = j.at("user_driven").get<bool>();
  if (j.contains("has_standby")) d.has_standby = j.at("has_standby").get<bool>();
  if (j.contains("credit_eur")) {
    const double c = j.at("credit_eur").get<double>();
    if (c < 0) throw ValidationError("credit must not be negative");
    d.credit = Money::from_eur(c);
  }
  return d;
}

}  // namespace

ApiService::ApiService(HomeEngine& engine, Clock clock)
    : engine_(engine), clock_(std::move(clock)), auth_(engine.config().tokens) {}

ApiService::~ApiService() = default;

const std::vector<std::pair<std::string, std::string>>& ApiService::routes() {
  static const std::vector<std::pair<std::string, std::string>> r{
      {"POST", "/api/v1/readings"},
      {"POST", "/api/v1/events"},
      {"GET", "/api/v1/devices"},
      {"POST", "/api/v1/devices"},
      {"PATCH", "/api/v1/devices/{id}"},
      {"GET", "/api/v1/events"},
      {"GET", "/api/v1/summary/day"},
      {"GET", "/api/v1/itemization"},
      {"GET", "/api/v1/estimate/today"},
      {"GET", "/api/v1/slots/distribution"},
      {"GET", "/api/v1/advices"},
      {"POST", "/api/v1/advices/{id}/feedback"},
      {"GET", "/api/v1/usage/{device}"},
  };
  return r;
}

ApiResponse ApiService::handle(const ApiRequest& req) {
  try {
    if (req.path.rfind(kPrefix, 0) != 0) throw HttpError(404, "not found");

    auto principal = auth_.authenticate(req.authorization);
    if (!principal) throw HttpError(401, "missing or invalid token");
    if (principal->household_id != engine_.config().household_id) throw HttpError(403, "token not valid for household");
    const bool writes = req.method != "GET";
    if (writes ? !principal->can_write : !principal->can_read) throw HttpError(403, "insufficient scope");

    std::vector<std::string> seg;
    for (auto s : split(std::string_view(req.path).substr(kPrefix.size()), '/')) {
      if (!s.empty()) seg.emplace_back(s);
    }
    const auto& m = req.method;
    const auto& tz = engine_.tariff().timezone;
    const std::size_t n = seg.size();
    auto is = [&](std::string_view method, std::initializer_list<std::string_view> pattern) {
      if (m != method || n != pattern.size()) return false;
      std::size_t i = 0;
      for (auto p : pattern) {
        if (p != "*" && p != seg[i]) return false;
        ++i;
      }
      return true;
    };

    if (is("POST", {"readings"})) {
      auto body = parse_body(req.body);
      if (!body.is_object() || !body.contains("channel_id") || !body.at("channel_id").is_string() ||
          !body.contains("samples") || !body.at("samples").is_array()) {
        throw HttpError(400, "body must be {channel_id, samples:[{t, w}]}");
      }
      const auto channel = body.at("channel_id").get<std::string>();
      if (channel.empty()) throw HttpError(400, "empty channel_id");
      Direction dir = engine_.config().direction_of(channel);
      if (body.contains("direction")) dir = parse_direction(body.at("direction").get<std::string>());

      const auto& rows = body.at("samples");
      std::vector<json> outcome(rows.size());
      std::vector<PowerSample> valid;
      std::vector<std::size_t> valid_index;
      std::set<Timestamp> seen;
      std::size_t rejected = 0, in_batch_dup = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        outcome[i] = {{"index", i}};
        try {
          if (!r.is_object() || !r.contains("t")) throw ValidationError("row needs 't'");
          PowerSample s{channel, parse_time_value(r.at("t")), std::nullopt, dir};
          if (r.contains("w") && !r.at("w").is_null()) {
            if (!r.at("w").is_number()) throw ValidationError("'w' must be a number or null");
            const double w = r.at("w").get<double>();
            if (!std::isfinite(w) || w < 0) throw ValidationError("'w' must be a finite number >= 0");
            s.power_w = w;
          }
          if (!seen.insert(s.timestamp).second) {
            outcome[i]["status"] = "duplicate";
            ++in_batch_dup;
            continue;
          }
          valid_index.push_back(i);
          valid.push_back(std::move(s));
        } catch (const Error& e) {
          outcome[i]["status"] = "rejected";
          outcome[i]["reason"] = e.what();
          ++rejected;
        }
      }
      auto appended = engine_.append_samples(valid);
      for (std::size_t k = 0; k < valid.size(); ++k) {
        outcome[valid_index[k]]["status"] = appended.inserted_rows[k] ? "stored" : "duplicate";
      }
      json res{{"channel_id", channel},
               {"accepted", appended.inserted},
               {"duplicates", appended.duplicates + in_batch_dup},
               {"rejected", rejected},
               {"rows", outcome}};
      return reply(rejected ? 400 : 200, res);
    }

    if (is("POST", {"events"})) {
      auto body = parse_body(req.body);
      json rows = body.is_object() && body.contains("events") ? body.at("events") : body;
      if (rows.is_object()) rows = json::array({rows});
      if (!rows.is_array()) throw HttpError(400, "body must be an event or {events:[...]}");
      std::vector<json> outcome;
      std::size_t stored = 0, dup = 0, rejected = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        json o{{"index", i}};
        try {
          const auto& r = rows[i];
          if (!r.is_object()) throw ValidationError("event must be an object");
          UsageEvent e;
          e.device_id = r.at("device_id").get<std::string>();
          e.t_start = parse_time_value(r.at("t_start"));
          e.duration = Seconds{r.at("duration_s").get<std::int64_t>()};
          e.energy_kwh = r.at("energy_kwh").get<double>();
          if (engine_.add_event(e)) {
            o["status"] = "stored";
            ++stored;
          } else {
            o["status"] = "duplicate";
            ++dup;
          }
        } catch (const json::exception& e) {
          o["status"] = "rejected";
          o["reason"] = fmt::format("bad field: {}", e.what());
          ++rejected;
        } catch (const Error& e) {
          o["status"] = "rejected";
          o["reason"] = e.what();
          ++rejected;
        }
        outcome.push_back(std::move(o));
      }
      json res{{"accepted", stored}, {"duplicates", dup}, {"rejected", rejected}, {"rows", outcome}};
      return reply(rejected ? 400 : 200, res);
    }

    if (is("GET", {"devices"})) {
      json list = json::array();
      for (const auto& d : engine_.devices()) list.push_back(device_json(d));
      return reply(200, {{"devices", list}});
    }

    if (is("POST", {"devices"})) {
      auto body = parse_body(req.body);
      if (!body.is_object() || !body.contains("device_id") || !body.contains("device_type")) {
        throw HttpError(400, "device needs device_id and device_type");
      }
      DeviceMetadata d;
      d.device_id = body.at("device_id").get<std::string>();
      d = apply_device_fields(d, body);
      engine_.register_device(d);
      return reply(201, device_json(*engine_.device(d.device_id)));
    }

    if (is("PATCH", {"devices", "*"})) {
      auto current = engine_.device(seg[1]);
      if (!current) throw NotFoundError(fmt::format("unknown device '{}'", seg[1]));
      auto body = parse_body(req.body);
      if (body.contains("device_id") && body.at("device_id") != seg[1]) {
        throw HttpError(400, "device_id cannot change");
      }
      engine_.update_device(apply_device_fields(*current, body));
      return reply(200, device_json(*engine_.device(seg[1])));
    }

    if (is("GET", {"events"})) {
      const auto device = query_or(req, "device", "");
      const auto from = req.query.count("from") ? parse_iso8601(req.query.at("from")) : Timestamp::min();
      const auto to = req.query.count("to") ? parse_iso8601(req.query.at("to")) : Timestamp::max();
      json list = json::array();
      for (const auto& e : engine_.events(device, from, to)) list.push_back(event_json(e));
      return reply(200, {{"events", list}});
    }

    if (is("GET", {"summary", "day"})) {
      const Date day = req.query.count("date") ? parse_date(req.query.at("date")) : tz.local_date(clock_());
      const auto s = engine_.summary_day(day);
      return reply(200, {{"date", format_date(s.date)},
                         {"consumption_kwh", round4(s.consumption_kwh)},
                         {"monitored_kwh", round4(s.monitored_kwh)},
                         {"production_kwh", round4(s.production_kwh)},
                         {"cost_eur", round4(s.cost_eur)}});
    }

    if (is("GET", {"itemization"})) {
      const auto kind = parse_period_kind(query_or(req, "period", "month"));
      const auto period = period_containing(clock_(), kind, tz);
      const auto entries = engine_.itemization(period);
      json list = json::array();
      double kwh = 0, eur = 0;
      for (const auto& e : entries) {
        kwh += e.energy_kwh;
        eur += e.cost_eur;
        list.push_back({{"device_id", e.device_id},
                        {"energy_kwh", round4(e.energy_kwh)},
                        {"cost_eur", round4(e.cost_eur)},
                        {"share", e.share}});
      }
      return reply(200, {{"period", query_or(req, "period", "month")},
                         {"from", format_iso8601(period.from)},
                         {"to", format_iso8601(period.to)},
                         {"total_kwh", round4(kwh)},
                         {"total_cost_eur", round4(eur)},
                         {"devices", list}});
    }

    if (is("GET", {"estimate", "today"})) {
      const auto e = engine_.estimate_today(clock_());
      json res{{"now", format_iso8601(e.now)},
               {"consumption_so_far_kwh", round4(e.consumption_so_far_kwh)},
               {"consumption_kwh", round4(e.consumption_kwh)}};
      res["production_so_far_kwh"] = e.production_so_far_kwh ? json(round4(*e.production_so_far_kwh)) : json(nullptr);
      res["production_kwh"] = e.production_kwh ? json(round4(*e.production_kwh)) : json(nullptr);
      return reply(200, res);
    }

    if (is("GET", {"slots", "distribution"})) {
      const Date first = req.query.count("month") ? parse_month(req.query.at("month"))
                                                  : [&] {
                                                      const auto ymd =
                                                          std::chrono::year_month_day{tz.local_date(clock_())};
                                                      return Date{ymd.year() / ymd.month() / 1};
                                                    }();
      const auto dist = engine_.slot_distribution(first);
      json devices = json::array();
      for (std::size_t i = 0; i < dist.devices.size(); ++i) {
        json energy = json::object(), percent = json::object();
        for (std::size_t k = 0; k < dist.slots.size(); ++k) {
          energy[dist.slots[k]] = round4(dist.energy_kwh[i][k]);
          percent[dist.slots[k]] = round4(dist.percent[i][k]);
        }
        devices.push_back({{"device_id", dist.devices[i]}, {"energy_kwh", energy}, {"percent", percent}});
      }
      const auto ymd = std::chrono::year_month_day{first};
      return reply(200, {{"month", fmt::format("{:04}-{:02}", int(ymd.year()), unsigned(ymd.month()))},
                         {"slots", dist.slots},
                         {"devices", devices}});
    }

    if (is("GET", {"advices"})) {
      json list = json::array();
      for (const auto& v : engine_.advise(principal->user_id, clock_())) list.push_back(advice_json(v));
      return reply(200, {{"user_id", principal->user_id}, {"seed", engine_.config().advisor.rng_seed}, {"advices", list}});
    }

    if (is("POST", {"advices", "*", "feedback"})) {
      auto body = parse_body(req.body);
      if (!body.is_object() || !body.contains("action") || !body.at("action").is_string()) {
        throw HttpError(400, "feedback needs an action");
      }
      FeedbackRecord r;
      r.user_id = principal->user_id;
      r.advice_id = seg[1];
      r.action = parse_feedback_action(body.at("action").get<std::string>());
      if (body.contains("cause") && !body.at("cause").is_null()) {
        r.cause = parse_reject_cause(body.at("cause").get<std::string>());
      }
      r.time = clock_();
      const auto updated = engine_.feedback(r);
      json list = json::array();
      for (const auto& v : engine_.active_advices(principal->user_id)) list.push_back(advice_json(v));
      return reply(200, {{"advice", advice_json({updated, engine_.render(updated)})}, {"advices", list}});
    }

    if (is("GET", {"usage", "*"})) {
      const int weeks = std::stoi(query_or(req, "weeks", "4"));
      const auto u = engine_.usage_model(seg[1], clock_(), weeks);
      return reply(200, {{"device_id", u.device_id},
                         {"weeks", weeks},
                         {"event_count", u.event_count},
                         {"events_per_week", round4(u.events_per_week)},
                         {"mean_event_kwh", round4(u.mean_event_kwh)},
                         {"start_hour_histogram", u.start_hour_histogram}});
    }

    throw HttpError(404, "no such route");
  } catch (const HttpError& e) {
    return reply(e.status, {{"error", e.what()}});
  } catch (const ValidationError& e) {
    return reply(400, {{"error", e.what()}});
  } catch (const ParseError& e) {
    return reply(400, {{"error", e.what()}});
  } catch (const NotFoundError& e) {
    return reply(404, {{"error", e.what()}});
  } catch (const ConflictError& e) {
    return reply(409, {{"error", e.what()}});
  } catch (const json::exception& e) {
    return reply(400, {{"error", e.what()}});
  } catch (const std::invalid_argument& e) {
    return reply(400, {{"error", e.what()}});
  } catch (const std::exception& e) {
    return reply(500, {{"error", e.what()}});
  }
}

int ApiService::bind(const std::string& host, int port) {
  server_ = std::make_unique<Server>();
  auto bridge = [this](const httplib::Request& in, httplib::Response& out) {
    ApiRequest req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    req.body = in.body;
    req.authorization = in.get_header_value("Authorization");
    auto res = handle(req);
    out.status = res.status;
    out.set_content(res.body, res.content_type);
  };
  auto& http = server_->http;
  http.Get(".*", bridge);
  http.Post(".*", bridge);
  http.Patch(".*", bridge);
  http.Put(".*", bridge);
  http.Delete(".*", bridge);
  const int bound = port == 0 ? http.bind_to_any_port(host) : (http.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error(fmt::format("cannot listen on {}:{}", host, port));
  return bound;
}

void ApiService::listen() {
  if (!server_) throw Error("bind() before listen()");
  server_->http.listen_after_bind();
}

void ApiService::serve(const std::string& host, int port) {
  bind(host, port);
  listen();
}

void ApiService::stop() {
  if (server_) server_->http.stop();
}

}  // namespace hems
