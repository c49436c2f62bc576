#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "hems/advisor/book.hpp"
#include "hems/advisor/generators.hpp"
#include "hems/advisor/templates.hpp"
#include "hems/error.hpp"

using namespace hems;

namespace {

DeviceProfile profile(std::string id, std::string type, bool driven, double mean_w = 0.0) {
  DeviceProfile p;
  p.device = {std::move(id), std::move(type), "kitchen", Mobility::fixed, false, driven, false, {}};
  p.mean_power_w = mean_w;
  return p;
}

Advice plain(const std::string& user, AdviceType t, const std::string& dev, const std::string& type) {
  Advice a;
  a.advice_id = make_advice_id(user, t, dev);
  a.user_id = user;
  a.type = t;
  a.device_id = dev;
  a.device_type = type;
  return a;
}

FeedbackRecord fb(const std::string& id, FeedbackAction act, std::optional<RejectCause> cause = {}) {
  return {"anna", id, act, cause, parse_iso8601("2014-09-07T10:00:00Z")};
}

TariffContext rome_ctx() {
  return {TariffScheme::load(fixtures::data_dir() / "tariff_it.txt"),
          HolidayCalendar::load(fixtures::data_dir() / "holidays_it.txt"), Timezone::from_name("Europe/Rome")};
}

}  // namespace

TEST_SUITE("advisor") {
  TEST_CASE("tie key follows the documented hash") {
    for (const char* id : {"", "anna.standby.tv-1", "bob.shifting.wm", "x"}) {
      for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, ~0ULL}) CHECK(tie_key(id, seed) == fixtures::reference_tie_key(id, seed));
    }
  }

  TEST_CASE("ranking ignores input order") {
    std::vector<Advice> base;
    for (int i = 0; i < 30; ++i) {
      auto a = plain("u", AdviceType::standby, "d" + std::to_string(i), "lamp");
      a.score = i % 4 - 2;
      base.push_back(a);
    }
    const auto ref = rank_advices(base, 7);
    for (std::size_t i = 1; i < ref.size(); ++i) {
      CHECK(ref[i - 1].score >= ref[i].score);
      if (ref[i - 1].score == ref[i].score) CHECK(tie_key(ref[i - 1].advice_id, 7) < tie_key(ref[i].advice_id, 7));
    }
    std::mt19937 rng(3);
    for (int k = 0; k < 10; ++k) {
      auto shuffled = base;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(rank_advices(shuffled, 7) == ref);
    }
    // a different seed reorders ties
    CHECK(rank_advices(base, 8) != ref);
  }

  TEST_CASE("feedback semantics") {
    AdviceBook book("anna");
    const auto tv = plain("anna", AdviceType::standby, "tv", "television");
    const auto pc = plain("anna", AdviceType::standby, "pc", "computer");
    const auto pc_shift = plain("anna", AdviceType::shifting, "pc", "computer");
    const auto wm = plain("anna", AdviceType::shifting, "wm", "washing machine");
    book.merge({tv, pc, pc_shift, wm});

    book.apply_feedback(fb(tv.advice_id, FeedbackAction::accept));
    CHECK(book.find(tv.advice_id)->score == 1);

    book.apply_feedback(fb(wm.advice_id, FeedbackAction::reject, RejectCause::advice_mistrust));
    CHECK(book.find(wm.advice_id)->score == -1);
    CHECK(book.find(pc_shift.advice_id)->score == -1);
    CHECK(book.find(pc.advice_id)->score == 0);

    book.apply_feedback(fb(pc.advice_id, FeedbackAction::reject, RejectCause::device_reluctance));
    CHECK(book.find(pc.advice_id)->score == -1);
    CHECK(book.find(pc_shift.advice_id)->score == -2);
    CHECK(book.find(tv.advice_id)->score == 1);

    book.apply_feedback(fb(wm.advice_id, FeedbackAction::converted));
    CHECK_FALSE(book.find(wm.advice_id)->enabled);
    CHECK_THROWS_AS(book.apply_feedback(fb(wm.advice_id, FeedbackAction::accept)), ConflictError);
    // disabled advices are not touched by later rejections
    book.apply_feedback(fb(pc_shift.advice_id, FeedbackAction::reject, RejectCause::advice_mistrust));
    CHECK(book.find(wm.advice_id)->score == -1);

    CHECK_THROWS_AS(book.apply_feedback(fb("anna.standby.nope", FeedbackAction::accept)), NotFoundError);
    CHECK_THROWS_AS(book.apply_feedback(fb(tv.advice_id, FeedbackAction::reject)), ValidationError);
    CHECK_THROWS_AS(book.apply_feedback(fb(tv.advice_id, FeedbackAction::accept, RejectCause::advice_mistrust)),
                    ValidationError);
    auto other = fb(tv.advice_id, FeedbackAction::accept);
    other.user_id = "bob";
    CHECK_THROWS_AS(book.apply_feedback(other), ValidationError);
    CHECK(book.log().size() == 5);

    const auto active = book.active(10, 42);
    CHECK(active.size() == 3);
    CHECK(active.front().advice_id == tv.advice_id);
    CHECK(book.active(1, 42).size() == 1);
  }

  TEST_CASE("random feedback against a model") {
    std::mt19937 rng(2024);
    const std::vector<std::string> types{"television", "computer", "fridge"};
    std::vector<Advice> all;
    for (int d = 0; d < 9; ++d) {
      for (auto t : {AdviceType::standby, AdviceType::shifting, AdviceType::curtailment}) {
        all.push_back(plain("anna", t, "dev" + std::to_string(d), types[d % 3]));
      }
    }
    AdviceBook book("anna");
    book.merge(all);
    std::map<std::string, Advice> model;
    for (const auto& a : all) model[a.advice_id] = a;

    for (int round = 0; round < 500; ++round) {
      const auto& pick = all[rng() % all.size()];
      const int kind = static_cast<int>(rng() % 4);
      FeedbackRecord r = kind == 0   ? fb(pick.advice_id, FeedbackAction::accept)
                         : kind == 1 ? fb(pick.advice_id, FeedbackAction::converted)
                         : kind == 2 ? fb(pick.advice_id, FeedbackAction::reject, RejectCause::advice_mistrust)
                                     : fb(pick.advice_id, FeedbackAction::reject, RejectCause::device_reluctance);
      if (kind == 1 && rng() % 4) r = fb(pick.advice_id, FeedbackAction::accept);  // keep conversions rare
      auto& target = model[pick.advice_id];
      if (!target.enabled) {
        CHECK_THROWS_AS(book.apply_feedback(r), ConflictError);
        continue;
      }
      book.apply_feedback(r);
      if (r.action == FeedbackAction::accept) ++target.score;
      if (r.action == FeedbackAction::converted) target.enabled = false;
      if (r.action == FeedbackAction::reject) {
        const auto type = target.type;
        const auto dtype = target.device_type;
        for (auto& [id, a] : model) {
          if (!a.enabled) continue;
          if (*r.cause == RejectCause::advice_mistrust ? a.type == type : a.device_type == dtype) --a.score;
        }
      }
      for (const auto& [id, a] : model) {
        REQUIRE(book.find(id)->score == a.score);
        REQUIRE(book.find(id)->enabled == a.enabled);
      }
    }
  }

  TEST_CASE("merge keeps state and refreshes parameters") {
    AdviceBook book("anna");
    auto tv = plain("anna", AdviceType::standby, "tv", "television");
    tv.saving_eur = 5.0;
    book.merge({tv});
    book.apply_feedback(fb(tv.advice_id, FeedbackAction::accept));
    tv.saving_eur = 6.0;
    tv.score = 99;
    book.merge({tv});
    CHECK(book.find(tv.advice_id)->score == 1);
    CHECK(book.find(tv.advice_id)->saving_eur == 6.0);
    // dropped from the latest run: kept but not active
    book.merge({});
    CHECK(book.find(tv.advice_id) != nullptr);
    CHECK(book.active(5, 1).empty());

    AdviceBook copy("anna");
    copy.restore(book.all(), book.log(), {tv.advice_id});
    CHECK(copy.active(5, 1).size() == 1);
    CHECK(copy.log() == book.log());
  }

  TEST_CASE("fleet statistics") {
    std::vector<DeviceProfile> ps{profile("a", "fridge", false, 20), profile("b", "fridge", false, 40),
                                  profile("c", "kettle", true, 5), profile("d", "kettle", true, 7)};
    ps[2].runs_month = 10;
    ps[3].runs_month = 20;
    const auto f = FleetStatistics::compute(ps);
    CHECK(f.find("fridge")->mean_power_w == doctest::Approx(30));
    CHECK(f.find("fridge")->devices == 2);
    CHECK_FALSE(f.find("fridge")->mean_monthly_runs);
    CHECK(*f.find("kettle")->mean_monthly_runs == doctest::Approx(15));
    CHECK(f.find("tv") == nullptr);
  }

  TEST_CASE("diagnostics threshold") {
    FleetStatistics fleet;
    fleet.types["fridge"] = {100.0, 10, std::nullopt};
    AdvisorConfig cfg;
    const double tau = cfg.tau1;
    std::vector<DeviceProfile> ps{profile("at", "fridge", false, 100.0 * (1 + tau)),
                                  profile("above", "fridge", false, 100.0 * (1 + tau) + 1e-6),
                                  profile("below", "fridge", false, 100.0 * (1 + tau) - 1e-6),
                                  profile("driven", "fridge", true, 500.0), profile("unknown", "freezer", false, 500.0)};
    const auto out = generate_diagnostics("anna", ps, fleet, cfg, 0.12);
    REQUIRE(out.size() == 1);
    CHECK(out[0].device_id == "above");
    CHECK(out[0].saving_eur == doctest::Approx((100.0 * tau + 1e-6) * 8.76 * 0.12));
    fleet.types["fridge"].devices = 0;
    CHECK(generate_diagnostics("anna", ps, fleet, cfg, 0.12).empty());
    cfg.tau1 = 0;
    CHECK_THROWS_AS(generate_diagnostics("anna", ps, fleet, cfg, 0.12), ValidationError);
  }

  TEST_CASE("shifting") {
    const auto ctx = rome_ctx();
    const auto t1 = ctx.scheme.slot_index("T1");
    const auto t2 = ctx.scheme.slot_index("T2");
    auto wm = profile("wm", "washing machine", true);
    wm.month_slot_kwh = {0, 0};
    wm.month_slot_kwh[t1] = 3.75;
    wm.month_slot_kwh[t2] = 6.0;
    wm.mean_event_kwh = 0.75;
    auto kettle = profile("k", "kettle", true);
    kettle.month_slot_kwh = {0, 0};
    kettle.month_slot_kwh[t1] = 0.5;
    kettle.mean_event_kwh = 0.1;
    auto oven = profile("oven", "electric oven", true);
    oven.month_slot_kwh = {0, 0};
    oven.month_slot_kwh[t1] = 2.0;
    oven.mean_event_kwh = 2.0;
    auto fridge = profile("f", "fridge", false);
    fridge.month_slot_kwh = {5, 5};
    const std::vector<DeviceProfile> ps{wm, kettle, oven, fridge};
    const auto out = generate_shifting("anna", ps, ctx, "C1", AdvisorConfig{});
    REQUIRE(out.size() == 2);  // kettle saves 0.0032 EUR and is suppressed
    CHECK(out[0].device_id == "oven");
    CHECK(out[1].device_id == "wm");
    CHECK(out[1].saving_eur == doctest::Approx(3.75 * (0.127512 - 0.121142)));
    CHECK(out[1].params.at("slot") == "T2");
    AdvisorConfig loose;
    loose.min_shift_saving_eur = -1;
    CHECK(generate_shifting("anna", ps, ctx, "C1", loose).size() == 3);
  }

  TEST_CASE("standby and curtailment") {
    auto tv = profile("tv", "television", true);
    tv.device.has_standby = true;
    tv.standby_power_w = 6.57;
    auto lamp = profile("lamp", "lamp", true);
    const std::vector<DeviceProfile> sb{tv, lamp};
    const auto s = generate_standby("anna", sb, 0.1);
    REQUIRE(s.size() == 1);
    CHECK(s[0].saving_eur == doctest::Approx(57.5532 * 0.1));

    FleetStatistics fleet;
    fleet.types["kettle"] = {0, 3, 10.0};
    fleet.types["washing machine"] = {0, 3, 4.0};
    auto k = profile("k", "kettle", true);
    k.runs_month = 14;
    k.month_cost_eur = 0.15;
    auto w = profile("w", "washing machine", true);
    w.runs_month = 7;
    w.month_cost_eur = 0.5;
    auto w2 = profile("w2", "washing machine", true);
    w2.runs_month = 4;
    w2.month_cost_eur = 0.5;
    const std::vector<DeviceProfile> cs{w, k, w2};
    const auto c = generate_curtailment("anna", cs, fleet);
    REQUIRE(c.size() == 2);
    CHECK(c[0].device_id == "k");
    CHECK(c[0].saving_eur == doctest::Approx(0.15 * 4.0 / 14.0 * 12.0));
    CHECK(c[1].saving_eur == doctest::Approx(0.5 * 3.0 / 7.0 * 12.0));
  }

  TEST_CASE("templates") {
    const auto t = MessageTemplates::load(fixtures::data_dir() / "templates.txt");
    auto a = plain("anna", AdviceType::shifting, "wm", "washing machine");
    a.params = {{"device", "washing machine"}, {"slot", "T2"}, {"saving_eur", "0.02"}};
    CHECK(t.render(a) == "Running your washing machine during T2 would save about 0.02 EUR per month.");
    const auto custom = MessageTemplates::parse("standby = {device} uses {mystery}\n");
    auto b = plain("anna", AdviceType::standby, "tv", "television");
    b.params = {{"device", "tv"}};
    CHECK(custom.render(b) == "tv uses {mystery}");
  }

  TEST_CASE("vocabulary of actions") {
    CHECK(parse_feedback_action("converted") == FeedbackAction::converted);
    CHECK(parse_reject_cause("advice_mistrust") == RejectCause::advice_mistrust);
    CHECK(parse_advice_type("curtailment") == AdviceType::curtailment);
    CHECK_THROWS_AS(parse_feedback_action("like"), ValidationError);
  }
}
