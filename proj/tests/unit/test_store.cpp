#include <doctest.h>

#include <atomic>
#include <thread>

#include "fixtures.hpp"
#include "hems/error.hpp"
#include "hems/store/store.hpp"

using namespace hems;

namespace {

PowerSample ps(const char* ch, std::int64_t t, std::optional<double> w, Direction d = Direction::consumption) {
  return {ch, from_unix(t), w, d};
}

}  // namespace

TEST_SUITE("store") {
  TEST_CASE("samples are idempotent per key") {
    fixtures::TempDir dir("store");
    Store s(dir.path() / "nested" / "hems.db");
    std::vector<PowerSample> batch;
    for (int i = 0; i < 100; ++i) batch.push_back(ps("fridge", 1000 + i, i % 10 ? std::optional<double>(i) : std::nullopt));
    auto r = s.append_samples(batch);
    CHECK(r.inserted == 100);
    CHECK(r.duplicates == 0);
    r = s.append_samples(batch);
    CHECK(r.inserted == 0);
    CHECK(r.duplicates == 100);
    CHECK(std::count(r.inserted_rows.begin(), r.inserted_rows.end(), true) == 0);

    // a conflicting value for an existing key leaves the stored row alone
    std::vector<PowerSample> again{ps("fridge", 1000, 5.0), ps("fridge", 2000, 1.0)};
    r = s.append_samples(again);
    CHECK(r.inserted_rows == std::vector<bool>{false, true});
    CHECK(s.samples("fridge").front().power_w == std::nullopt);

    const auto window = s.samples("fridge", from_unix(1010), from_unix(1020));
    REQUIRE(window.size() == 10);
    CHECK(window.front().timestamp == from_unix(1010));
    CHECK(window == std::vector<PowerSample>(batch.begin() + 10, batch.begin() + 20));
    CHECK(s.sample_range("fridge")->second == from_unix(2000));
    CHECK_FALSE(s.sample_range("nothing"));
  }

  TEST_CASE("channels, events, devices persist across reopen") {
    fixtures::TempDir dir("store");
    const auto path = dir.path() / "hems.db";
    const UsageEvent e1{"wm", from_unix(5000), Seconds{600}, 1.25, 0.16};
    const UsageEvent e2{"tv", from_unix(4000), Seconds{60}, 0.01, std::nullopt};
    const DeviceMetadata wm{"wm", "washing machine", "bathroom", Mobility::portable, true, true, false,
                            Money::from_millicents(123456)};
    const CreditCharge charge{"wm", e1.key(), Money::from_eur(0.16), Money::from_millicents(107456)};
    {
      Store s(path);
      s.append_samples(std::vector<PowerSample>{ps("pv", 10, 100.0, Direction::production), ps("wm", 10, 1.0)});
      CHECK(s.insert_event(e1));
      CHECK_FALSE(s.insert_event(e1));
      CHECK(s.insert_event(e2));
      s.upsert_device(wm);
      s.append_charge(charge);
      CHECK_THROWS(s.append_charge(charge));
      s.set_meta("household_id", "home");
    }
    Store s(path);
    const auto ch = s.channels();
    REQUIRE(ch.size() == 2);
    CHECK(ch[0] == std::pair<std::string, Direction>{"pv", Direction::production});
    CHECK(s.events() == std::vector<UsageEvent>{e2, e1});
    CHECK(s.events("wm", from_unix(0), from_unix(5000)).empty());
    CHECK(s.events("", from_unix(0), from_unix(5001)).size() == 2);
    CHECK(s.devices() == std::vector<DeviceMetadata>{wm});
    CHECK(s.charges() == std::vector<CreditCharge>{charge});
    CHECK(s.meta("household_id") == "home");
    CHECK_FALSE(s.meta("other"));
  }

  TEST_CASE("advices and feedback round trip") {
    fixtures::TempDir dir("store");
    Store s(dir.path() / "hems.db");
    Advice a;
    a.advice_id = "anna.standby.tv";
    a.user_id = "anna";
    a.type = AdviceType::standby;
    a.device_type = "television";
    a.device_id = "tv";
    a.params = {{"device", "television"}, {"kwh_year", "57.6"}};
    a.saving_eur = 7.25;
    a.score = -3;
    Advice b = a;
    b.advice_id = "anna.curtailment.tv";
    b.type = AdviceType::curtailment;
    b.enabled = false;
    s.save_advices("anna", {a, b}, {a.advice_id});
    CHECK(s.advices("anna") == std::vector<Advice>{b, a});
    CHECK(s.current_advices("anna") == std::set<std::string>{a.advice_id});
    CHECK(s.advices("bob").empty());
    s.save_advices("anna", {a}, {});
    CHECK(s.advices("anna").size() == 1);

    const FeedbackRecord r1{"anna", a.advice_id, FeedbackAction::reject, RejectCause::advice_mistrust, from_unix(77)};
    const FeedbackRecord r2{"anna", a.advice_id, FeedbackAction::accept, std::nullopt, from_unix(78)};
    s.append_feedback(r1, a.type, a.device_type);
    s.append_feedback(r2, a.type, a.device_type);
    CHECK(s.feedback("anna") == std::vector<FeedbackRecord>{r1, r2});
  }

  TEST_CASE("transactions roll back and nest") {
    fixtures::TempDir dir("store");
    Store s(dir.path() / "hems.db");
    CHECK_THROWS_AS(s.transaction([&] {
      s.insert_event({"wm", from_unix(1), Seconds{60}, 1.0, std::nullopt});
      throw ValidationError("boom");
    }),
                    ValidationError);
    CHECK(s.events().empty());
    s.transaction([&] {
      s.insert_event({"wm", from_unix(1), Seconds{60}, 1.0, std::nullopt});
      s.transaction([&] { s.set_meta("k", "v"); });
    });
    CHECK(s.events().size() == 1);
    CHECK(s.meta("k") == "v");
  }

  TEST_CASE("concurrent appends keep every row once") {
    fixtures::TempDir dir("store");
    Store s(dir.path() / "hems.db");
    std::vector<std::thread> workers;
    std::atomic<std::size_t> inserted{0};
    for (int w = 0; w < 4; ++w) {
      workers.emplace_back([&] {
        std::vector<PowerSample> batch;
        for (int i = 0; i < 500; ++i) batch.push_back(ps("c", i, 1.0));
        inserted += s.append_samples(batch).inserted;
      });
    }
    for (auto& t : workers) t.join();
    CHECK(inserted == 500);
    CHECK(s.samples("c").size() == 500);
  }
}
