#include "hems/store/store.hpp"

#include <sqlite3.h>

#include <fmt/format.h>
#include <json.hpp>

#include "hems/error.hpp"

namespace hems {
namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS samples (
  channel_id TEXT NOT NULL,
  t INTEGER NOT NULL,
  w REAL,
  direction TEXT NOT NULL,
  PRIMARY KEY (channel_id, t)
) WITHOUT ROWID;
CREATE TABLE IF NOT EXISTS events (
  device_id TEXT NOT NULL,
  t_start INTEGER NOT NULL,
  duration INTEGER NOT NULL,
  energy_kwh REAL NOT NULL,
  cost_eur REAL,
  PRIMARY KEY (device_id, t_start)
);
CREATE TABLE IF NOT EXISTS devices (
  device_id TEXT PRIMARY KEY,
  device_type TEXT NOT NULL,
  room TEXT NOT NULL,
  mobility TEXT NOT NULL,
  curtailable INTEGER NOT NULL,
  user_driven INTEGER NOT NULL,
  has_standby INTEGER NOT NULL,
  credit_millicents INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS charges (
  seq INTEGER PRIMARY KEY AUTOINCREMENT,
  device_id TEXT NOT NULL,
  event_key TEXT NOT NULL UNIQUE,
  charged_millicents INTEGER NOT NULL,
  credit_after_millicents INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS advices (
  user_id TEXT NOT NULL,
  advice_id TEXT NOT NULL,
  advice_type TEXT NOT NULL,
  device_type TEXT NOT NULL,
  device_id TEXT NOT NULL,
  params TEXT NOT NULL,
  saving_eur REAL NOT NULL,
  enabled INTEGER NOT NULL,
  score INTEGER NOT NULL,
  current INTEGER NOT NULL,
  PRIMARY KEY (user_id, advice_id)
);
CREATE TABLE IF NOT EXISTS feedback (
  seq INTEGER PRIMARY KEY AUTOINCREMENT,
  user_id TEXT NOT NULL,
  advice_id TEXT NOT NULL,
  advice_type TEXT NOT NULL,
  device_type TEXT NOT NULL,
  action TEXT NOT NULL,
  cause TEXT,
  t INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS meta (
  key TEXT PRIMARY KEY,
  value TEXT NOT NULL
);
)sql";

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw Error(fmt::format("sqlite prepare failed: {}", sqlite3_errmsg(db)));
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int i, const std::string& v) {
    sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Statement& bind(int i, std::int64_t v) {
    sqlite3_bind_int64(stmt_, i, v);
    return *this;
  }
  Statement& bind(int i, double v) {
    sqlite3_bind_double(stmt_, i, v);
    return *this;
  }
  Statement& bind(int i, std::optional<double> v) {
    if (v) sqlite3_bind_double(stmt_, i, *v);
    else sqlite3_bind_null(stmt_, i);
    return *this;
  }
  Statement& bind_null(int i) {
    sqlite3_bind_null(stmt_, i);
    return *this;
  }

  /// true while rows remain.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(fmt::format("sqlite step failed: {}", sqlite3_errmsg(db_)));
  }
  void reset() {
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
  }
  int changes() const { return sqlite3_changes(db_); }

  std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }
  double real(int col) const { return sqlite3_column_double(stmt_, col); }
  bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
  std::string text(int col) const {
    auto p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string{};
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

UsageEvent read_event(const Statement& s) {
  UsageEvent e;
  e.device_id = s.text(0);
  e.t_start = from_unix(s.integer(1));
  e.duration = Seconds{s.integer(2)};
  e.energy_kwh = s.real(3);
  if (!s.is_null(4)) e.cost_eur = s.real(4);
  return e;
}

}  // namespace

Store::Store(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (sqlite3_open_v2(path.string().c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                      nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw Error(fmt::format("cannot open store '{}': {}", path.string(), msg));
  }
  sqlite3_busy_timeout(db_, 5000);
  exec("PRAGMA journal_mode=WAL");
  exec("PRAGMA synchronous=NORMAL");
  exec(kSchema);
}

Store::~Store() { sqlite3_close(db_); }

void Store::exec(const char* sql) const {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw Error(fmt::format("sqlite: {}", msg));
  }
}

Store::AppendResult Store::append_samples(std::span<const PowerSample> samples) {
  AppendResult result;
  result.inserted_rows.reserve(samples.size());
  transaction([&] {
    Statement st(db_, "INSERT OR IGNORE INTO samples (channel_id, t, w, direction) VALUES (?, ?, ?, ?)");
    for (const auto& s : samples) {
      st.bind(1, s.channel_id).bind(2, to_unix(s.timestamp)).bind(3, s.power_w);
      st.bind(4, std::string{to_string(s.direction)});
      st.step();
      const bool fresh = st.changes() > 0;
      result.inserted_rows.push_back(fresh);
      ++(fresh ? result.inserted : result.duplicates);
      st.reset();
    }
  });
  return result;
}

std::vector<PowerSample> Store::samples(const std::string& channel, Timestamp from, Timestamp to) const {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT t, w, direction FROM samples WHERE channel_id = ? AND t >= ? AND t < ? ORDER BY t");
  st.bind(1, channel).bind(2, to_unix(from)).bind(3, to_unix(to));
  std::vector<PowerSample> out;
  while (st.step()) {
    PowerSample s{channel, from_unix(st.integer(0)), std::nullopt, parse_direction(st.text(2))};
    if (!st.is_null(1)) s.power_w = st.real(1);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PowerSample> Store::samples(const std::string& channel) const {
  return samples(channel, Timestamp::min(), Timestamp::max());
}

std::vector<std::pair<std::string, Direction>> Store::channels() const {
  std::lock_guard lock(mutex_);
  // Loose index scan: one probe per channel instead of a full table walk.
  std::vector<std::pair<std::string, Direction>> out;
  Statement first(db_, "SELECT channel_id, direction FROM samples ORDER BY channel_id LIMIT 1");
  Statement next(db_, "SELECT channel_id, direction FROM samples WHERE channel_id > ? ORDER BY channel_id LIMIT 1");
  if (!first.step()) return out;
  out.emplace_back(first.text(0), parse_direction(first.text(1)));
  while (true) {
    next.bind(1, out.back().first);
    if (!next.step()) break;
    out.emplace_back(next.text(0), parse_direction(next.text(1)));
    next.reset();
  }
  return out;
}

std::optional<std::pair<Timestamp, Timestamp>> Store::sample_range(const std::string& channel) const {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT MIN(t), MAX(t) FROM samples WHERE channel_id = ?");
  st.bind(1, channel);
  if (!st.step() || st.is_null(0)) return std::nullopt;
  return std::make_pair(from_unix(st.integer(0)), from_unix(st.integer(1)));
}

bool Store::insert_event(const UsageEvent& e) {
  std::lock_guard lock(mutex_);
  Statement st(db_,
               "INSERT OR IGNORE INTO events (device_id, t_start, duration, energy_kwh, cost_eur) VALUES (?, ?, ?, ?, ?)");
  st.bind(1, e.device_id).bind(2, to_unix(e.t_start)).bind(3, static_cast<std::int64_t>(e.duration.count()));
  st.bind(4, e.energy_kwh).bind(5, e.cost_eur);
  st.step();
  return st.changes() > 0;
}

std::vector<UsageEvent> Store::events(const std::string& device, Timestamp from, Timestamp to) const {
  std::lock_guard lock(mutex_);
  std::vector<UsageEvent> out;
  if (device.empty()) {
    Statement st(db_,
                 "SELECT device_id, t_start, duration, energy_kwh, cost_eur FROM events "
                 "WHERE t_start >= ? AND t_start < ? ORDER BY device_id, t_start");
    st.bind(1, to_unix(from)).bind(2, to_unix(to));
    while (st.step()) out.push_back(read_event(st));
  } else {
    Statement st(db_,
                 "SELECT device_id, t_start, duration, energy_kwh, cost_eur FROM events "
                 "WHERE device_id = ? AND t_start >= ? AND t_start < ? ORDER BY t_start");
    st.bind(1, device).bind(2, to_unix(from)).bind(3, to_unix(to));
    while (st.step()) out.push_back(read_event(st));
  }
  return out;
}

std::vector<UsageEvent> Store::events() const { return events("", Timestamp::min(), Timestamp::max()); }

void Store::upsert_device(const DeviceMetadata& d) {
  std::lock_guard lock(mutex_);
  Statement st(db_,
               "INSERT INTO devices (device_id, device_type, room, mobility, curtailable, user_driven, has_standby, "
               "credit_millicents) VALUES (?, ?, ?, ?, ?, ?, ?, ?) ON CONFLICT(device_id) DO UPDATE SET "
               "device_type = excluded.device_type, room = excluded.room, mobility = excluded.mobility, "
               "curtailable = excluded.curtailable, user_driven = excluded.user_driven, "
               "has_standby = excluded.has_standby, credit_millicents = excluded.credit_millicents");
  st.bind(1, d.device_id).bind(2, d.device_type).bind(3, d.room).bind(4, std::string{to_string(d.mobility)});
  st.bind(5, std::int64_t{d.curtailable}).bind(6, std::int64_t{d.user_driven}).bind(7, std::int64_t{d.has_standby});
  st.bind(8, d.credit.millicents());
  st.step();
}

std::vector<DeviceMetadata> Store::devices() const {
  std::lock_guard lock(mutex_);
  Statement st(db_,
               "SELECT device_id, device_type, room, mobility, curtailable, user_driven, has_standby, "
               "credit_millicents FROM devices ORDER BY device_id");
  std::vector<DeviceMetadata> out;
  while (st.step()) {
    DeviceMetadata d;
    d.device_id = st.text(0);
    d.device_type = st.text(1);
    d.room = st.text(2);
    d.mobility = parse_mobility(st.text(3));
    d.curtailable = st.integer(4) != 0;
    d.user_driven = st.integer(5) != 0;
    d.has_standby = st.integer(6) != 0;
    d.credit = Money::from_millicents(st.integer(7));
    out.push_back(std::move(d));
  }
  return out;
}

void Store::append_charge(const CreditCharge& c) {
  std::lock_guard lock(mutex_);
  Statement st(db_,
               "INSERT INTO charges (device_id, event_key, charged_millicents, credit_after_millicents) "
               "VALUES (?, ?, ?, ?)");
  st.bind(1, c.device_id).bind(2, c.event_key).bind(3, c.charged.millicents()).bind(4, c.credit_after.millicents());
  st.step();
}

std::vector<CreditCharge> Store::charges() const {
  std::lock_guard lock(mutex_);
  Statement st(db_,
               "SELECT device_id, event_key, charged_millicents, credit_after_millicents FROM charges ORDER BY seq");
  std::vector<CreditCharge> out;
  while (st.step()) {
    out.push_back({st.text(0), st.text(1), Money::from_millicents(st.integer(2)),
                   Money::from_millicents(st.integer(3))});
  }
  return out;
}

void Store::save_advices(const std::string& user_id, const std::vector<Advice>& advices,
                         const std::set<std::string>& current) {
  transaction([&] {
    Statement del(db_, "DELETE FROM advices WHERE user_id = ?");
    del.bind(1, user_id);
    del.step();
    Statement st(db_,
                 "INSERT INTO advices (user_id, advice_id, advice_type, device_type, device_id, params, saving_eur, "
                 "enabled, score, current) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)");
    for (const auto& a : advices) {
      nlohmann::json params = a.params;
      st.bind(1, user_id).bind(2, a.advice_id).bind(3, std::string{to_string(a.type)}).bind(4, a.device_type);
      st.bind(5, a.device_id).bind(6, params.dump()).bind(7, a.saving_eur);
      st.bind(8, std::int64_t{a.enabled}).bind(9, std::int64_t{a.score});
      st.bind(10, std::int64_t{current.count(a.advice_id) > 0});
      st.step();
      st.reset();
    }
  });
}

std::vector<Advice> Store::advices(const std::string& user_id) const {
  std::lock_guard lock(mutex_);
  Statement st(db_,
               "SELECT advice_id, advice_type, device_type, device_id, params, saving_eur, enabled, score "
               "FROM advices WHERE user_id = ? ORDER BY advice_id");
  st.bind(1, user_id);
  std::vector<Advice> out;
  while (st.step()) {
    Advice a;
    a.advice_id = st.text(0);
    a.user_id = user_id;
    a.type = parse_advice_type(st.text(1));
    a.device_type = st.text(2);
    a.device_id = st.text(3);
    a.params = nlohmann::json::parse(st.text(4)).get<std::map<std::string, std::string>>();
    a.saving_eur = st.real(5);
    a.enabled = st.integer(6) != 0;
    a.score = static_cast<int>(st.integer(7));
    out.push_back(std::move(a));
  }
  return out;
}

std::set<std::string> Store::current_advices(const std::string& user_id) const {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT advice_id FROM advices WHERE user_id = ? AND current = 1");
  st.bind(1, user_id);
  std::set<std::string> out;
  while (st.step()) out.insert(st.text(0));
  return out;
}

void Store::append_feedback(const FeedbackRecord& r, AdviceType type, const std::string& device_type) {
  std::lock_guard lock(mutex_);
  Statement st(db_,
               "INSERT INTO feedback (user_id, advice_id, advice_type, device_type, action, cause, t) "
               "VALUES (?, ?, ?, ?, ?, ?, ?)");
  st.bind(1, r.user_id).bind(2, r.advice_id).bind(3, std::string{to_string(type)}).bind(4, device_type);
  st.bind(5, std::string{to_string(r.action)});
  if (r.cause) st.bind(6, std::string{to_string(*r.cause)});
  else st.bind_null(6);
  st.bind(7, to_unix(r.time));
  st.step();
}

std::vector<FeedbackRecord> Store::feedback(const std::string& user_id) const {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT advice_id, action, cause, t FROM feedback WHERE user_id = ? ORDER BY seq");
  st.bind(1, user_id);
  std::vector<FeedbackRecord> out;
  while (st.step()) {
    FeedbackRecord r;
    r.user_id = user_id;
    r.advice_id = st.text(0);
    r.action = parse_feedback_action(st.text(1));
    if (!st.is_null(2)) r.cause = parse_reject_cause(st.text(2));
    r.time = from_unix(st.integer(3));
    out.push_back(std::move(r));
  }
  return out;
}

void Store::set_meta(const std::string& key, const std::string& value) {
  std::lock_guard lock(mutex_);
  Statement st(db_, "INSERT INTO meta (key, value) VALUES (?, ?) ON CONFLICT(key) DO UPDATE SET value = excluded.value");
  st.bind(1, key).bind(2, value);
  st.step();
}

std::optional<std::string> Store::meta(const std::string& key) const {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT value FROM meta WHERE key = ?");
  st.bind(1, key);
  if (!st.step()) return std::nullopt;
  return st.text(0);
}

}  // namespace hems
