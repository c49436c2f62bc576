#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "hems/error.hpp"
#include "hems/money.hpp"
#include "hems/text.hpp"
#include "hems/time.hpp"

using namespace hems;
using std::chrono::days;

TEST_SUITE("time") {
  TEST_CASE("iso8601 round trip and offsets") {
    const auto t = parse_iso8601("2014-09-01T12:00:00Z");
    CHECK(to_unix(t) == 1409572800);
    CHECK(format_iso8601(t) == "2014-09-01T12:00:00Z");
    CHECK(parse_iso8601("2014-09-01T14:00:00+02:00") == t);
    CHECK(parse_iso8601("2014-09-01T11:30:00-00:30") == t);
    CHECK(parse_iso8601("2014-09-01T12:00:00.75Z") == t);
    CHECK(parse_iso8601("1409572800") == t);
    CHECK_THROWS_AS(parse_iso8601("2014-13-01T00:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_iso8601("yesterday"), ParseError);
  }

  TEST_CASE("dates and months") {
    CHECK(format_date(parse_date("2016-02-29")) == "2016-02-29");
    CHECK(parse_month("2014-09") == parse_date("2014-09-01"));
    CHECK_THROWS_AS(parse_date("2015-02-29"), ParseError);
  }

  TEST_CASE("rome offsets follow the summer-time rule") {
    const auto tz = Timezone::from_name("Europe/Rome");
    // 2014 summer time: 2014-03-30T01:00Z to 2014-10-26T01:00Z.
    CHECK(tz.offset_at(parse_iso8601("2014-03-30T00:59:59Z")) == Seconds{3600});
    CHECK(tz.offset_at(parse_iso8601("2014-03-30T01:00:00Z")) == Seconds{7200});
    CHECK(tz.offset_at(parse_iso8601("2014-10-26T00:59:59Z")) == Seconds{7200});
    CHECK(tz.offset_at(parse_iso8601("2014-10-26T01:00:00Z")) == Seconds{3600});
    CHECK(tz.next_transition(parse_iso8601("2014-06-01T00:00:00Z")) == parse_iso8601("2014-10-26T01:00:00Z"));
  }

  TEST_CASE("rome offsets agree with the calendar reference over random instants") {
    const auto tz = Timezone::from_name("Europe/Rome");
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> pick(parse_iso8601("1996-01-01T00:00:00Z").time_since_epoch().count(),
                                                      parse_iso8601("2039-12-31T00:00:00Z").time_since_epoch().count());
    for (int i = 0; i < 20000; ++i) {
      const auto t = pick(rng);
      REQUIRE(tz.offset_at(from_unix(t)).count() == fixtures::rome_offset(t));
    }
  }

  TEST_CASE("local days and wall-clock conversion") {
    const auto tz = Timezone::from_name("Europe/Rome");
    const auto d = parse_date("2014-09-01");
    CHECK(tz.start_of_day(d) == parse_iso8601("2014-08-31T22:00:00Z"));
    CHECK(tz.local_date(parse_iso8601("2014-08-31T22:00:00Z")) == d);
    CHECK(tz.local_date(parse_iso8601("2014-08-31T21:59:59Z")) == d - days{1});
    // spring-forward day has 23 hours, fall-back day 25
    const auto spring = parse_date("2014-03-30");
    CHECK(tz.start_of_day(spring + days{1}) - tz.start_of_day(spring) == Seconds{23 * 3600});
    const auto fall = parse_date("2014-10-26");
    CHECK(tz.start_of_day(fall + days{1}) - tz.start_of_day(fall) == Seconds{25 * 3600});
    // 02:30 does not exist on the spring day: resolved with the pre-transition offset
    const std::chrono::local_seconds gap{std::chrono::local_days{spring.time_since_epoch()}.time_since_epoch() + Seconds{2 * 3600 + 1800}};
    CHECK(tz.from_local(gap) == parse_iso8601("2014-03-30T01:30:00Z"));
    // 02:30 exists twice on the fall day: earlier instant
    const std::chrono::local_seconds dup{std::chrono::local_days{fall.time_since_epoch()}.time_since_epoch() + Seconds{2 * 3600 + 1800}};
    CHECK(tz.from_local(dup) == parse_iso8601("2014-10-26T00:30:00Z"));
  }

  TEST_CASE("utc zone and unknown names") {
    const auto utc = Timezone::utc();
    CHECK(utc.offset_at(parse_iso8601("2014-07-01T00:00:00Z")) == Seconds{0});
    CHECK(utc.next_transition(parse_iso8601("2014-07-01T00:00:00Z")) == Timestamp::max());
    CHECK_THROWS_AS(Timezone::from_name("Mars/Olympus"), ValidationError);
  }

  TEST_CASE("money is exact in milli-cents") {
    CHECK(Money::from_eur(10.0).millicents() == 1'000'000);
    CHECK((Money::from_eur(10.0) - Money::from_eur(0.5)).to_string() == "9.50");
    CHECK(Money::from_eur(0.127512).millicents() == 12751);
    CHECK(Money::from_eur(0.0).to_string() == "0.00");
  }

  TEST_CASE("text helpers") {
    CHECK(split_ws("  a \tb  c ").size() == 3);
    CHECK(split("a,,b", ',').size() == 3);
    CHECK(strip_comment("  x = 1 # note") == "x = 1");
    double v = 0;
    CHECK(parse_double("1.5", v));
    CHECK(v == 1.5);
    CHECK_FALSE(parse_double("1.5x", v));
    CHECK_FALSE(parse_double("", v));
  }
}
