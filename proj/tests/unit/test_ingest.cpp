#include <doctest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "hems/error.hpp"
#include "hems/ingest/series.hpp"
#include "hems/ingest/trace.hpp"

using namespace hems;

namespace {

std::vector<PowerSample> constant(const std::string& ch, std::int64_t t0, int n, double w, int step = 1) {
  std::vector<PowerSample> out;
  for (int i = 0; i < n; ++i) out.push_back({ch, from_unix(t0 + i * step), w, Direction::consumption});
  return out;
}

std::vector<PowerSample> values(const std::string& ch, std::int64_t t0, std::vector<double> w) {
  std::vector<PowerSample> out;
  for (std::size_t i = 0; i < w.size(); ++i) out.push_back({ch, from_unix(t0 + static_cast<std::int64_t>(i)), w[i]});
  return out;
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("three rows, two channels give six ordered samples") {
    const auto r = parse_trace("timestamp,a,b\n100,1,2\n101,3,4\n102,5,6\n");
    REQUIRE(r.samples.size() == 6);
    CHECK(r.channels == std::vector<std::string>{"a", "b"});
    CHECK(r.samples[0].channel_id == "a");
    CHECK(r.samples[1].channel_id == "b");
    CHECK(*r.samples[5].power_w == 6.0);
    CHECK(r.malformed_rows == 0);
    for (std::size_t i = 2; i < r.samples.size(); ++i) CHECK(r.samples[i].timestamp >= r.samples[i - 2].timestamp);
  }

  TEST_CASE("empty cell and NULL are explicit gaps, not zero") {
    const auto r = parse_trace("timestamp,a\n100,\n101,NULL\n102,0\n");
    REQUIRE(r.samples.size() == 3);
    CHECK_FALSE(r.samples[0].power_w.has_value());
    CHECK_FALSE(r.samples[1].power_w.has_value());
    CHECK(r.samples[2].power_w == 0.0);
  }

  TEST_CASE("duplicated timestamps keep the first row") {
    const std::string text = "timestamp,a\n100,1\n101,2\n101,9\n102,3\n100,7\n";
    const auto r = parse_trace(text);
    // set-based reference: first occurrence per timestamp
    std::map<std::int64_t, double> first;
    for (auto [t, w] : std::vector<std::pair<int, double>>{{100, 1}, {101, 2}, {101, 9}, {102, 3}, {100, 7}}) {
      first.emplace(t, w);
    }
    CHECK(r.duplicate_rows == 2);
    REQUIRE(r.samples.size() == first.size());
    std::size_t i = 0;
    for (auto [t, w] : first) {
      CHECK(to_unix(r.samples[i].timestamp) == t);
      CHECK(*r.samples[i].power_w == w);
      ++i;
    }
  }

  TEST_CASE("out-of-order rows are reordered with a warning") {
    const auto r = parse_trace("timestamp,a\n102,3\n100,1\n101,2\n");
    CHECK(r.reordered);
    CHECK_FALSE(r.warnings.empty());
    CHECK(to_unix(r.samples[0].timestamp) == 100);
    CHECK(to_unix(r.samples[2].timestamp) == 102);
  }

  TEST_CASE("malformed rows are counted and skipped") {
    const auto r = parse_trace("timestamp,a,b\n100,1,2\nabc,1,2\n101,1\n102,-5,1\n103,x,1\n104,1,2\n");
    CHECK(r.rows == 6);
    CHECK(r.malformed_rows == 4);
    CHECK(r.samples.size() == 4);
  }

  TEST_CASE("missing header is a parse error") {
    CHECK_THROWS_AS(parse_trace("100,1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_trace(""), ParseError);
  }

  TEST_CASE("direction map applies per channel") {
    TraceParseOptions o;
    o.directions["pv"] = Direction::production;
    const auto r = parse_trace("timestamp,pv,fridge\n100,1,2\n", o);
    CHECK(r.samples[0].direction == Direction::production);
    CHECK(r.samples[1].direction == Direction::consumption);
  }

  TEST_CASE("parse then serialize reproduces a canonical trace") {
    std::vector<std::vector<PowerSample>> chans;
    for (int c = 0; c < 3; ++c) chans.push_back(fixtures::random_trace("ch" + std::to_string(c), 1000, 600, 11 + c));
    const auto text = fixtures::to_csv(chans);
    const auto first = parse_trace(text);
    const auto again = parse_trace(serialize_trace(first.samples));
    CHECK(again.samples == first.samples);
    CHECK(serialize_trace(again.samples) == serialize_trace(first.samples));
  }

  TEST_CASE("resample: constant and mean") {
    const auto a = resample(constant("a", 0, 4, 100.0), Seconds{4});
    REQUIRE(a.size() == 1);
    CHECK(*a[0].power_w == 100.0);
    const auto b = resample(values("a", 0, {0, 0, 200, 200}), Seconds{4});
    REQUIRE(b.size() == 1);
    CHECK(*b[0].power_w == 100.0);
    CHECK_THROWS_AS(resample(b, Seconds{0}), ValidationError);
    CHECK_THROWS_AS(resample(b, Seconds{-5}), ValidationError);
  }

  TEST_CASE("resample: all-missing bins stay missing, empty bins are omitted") {
    std::vector<PowerSample> s = values("a", 0, {1, 1, 1, 1});
    s[0].power_w.reset();
    s[1].power_w.reset();
    s.push_back({"a", from_unix(20), 5.0});
    const auto r = resample(s, Seconds{2});
    REQUIRE(r.size() == 3);
    CHECK_FALSE(r[0].power_w.has_value());
    CHECK(*r[1].power_w == 1.0);
    CHECK(to_unix(r[2].timestamp) == 20);
  }

  TEST_CASE("resample is idempotent and preserves window energy") {
    for (std::uint32_t seed = 1; seed <= 5; ++seed) {
      std::mt19937 rng(seed);
      std::uniform_real_distribution<double> w(0.0, 3000.0);
      std::vector<PowerSample> s;
      const std::int64_t t0 = 1'400'000'040;  // multiple of 60
      for (int i = 0; i < 3600; ++i) s.push_back({"a", from_unix(t0 + i), w(rng)});
      const auto once = resample(s, Seconds{60});
      CHECK(resample(once, Seconds{60}) == once);
      const auto from = from_unix(t0 + 600), to = from_unix(t0 + 2400);
      const double fine = integrate_kwh(s, from, to);
      const double coarse = integrate_kwh(once, from, to);
      CHECK(std::abs(coarse - fine) <= 0.01 * fine);
    }
  }

  TEST_CASE("daily energy agrees before and after resampling a gap-free trace") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> w(0.0, 500.0);
    std::vector<PowerSample> s;
    for (int i = 0; i < 86400; ++i) s.push_back({"a", from_unix(1'400'025'600 + i), w(rng)});
    const auto day_from = from_unix(1'400'025'600), day_to = from_unix(1'400'112'000);
    const double fine = integrate_kwh(s, day_from, day_to);
    const double coarse = integrate_kwh(resample(s, Seconds{300}), day_from, day_to);
    CHECK(std::abs(coarse - fine) <= 0.01 * fine);
  }

  TEST_CASE("merge: sum, identity, mixed directions") {
    std::vector<std::vector<PowerSample>> two{constant("a", 0, 10, 50.0), constant("b", 0, 10, 50.0)};
    const auto m = merge_channels(two, "agg");
    REQUIRE(m.size() == 10);
    for (const auto& s : m) CHECK(*s.power_w == 100.0);

    std::vector<std::vector<PowerSample>> one_missing{constant("a", 0, 10, 42.0), {}};
    const auto id = merge_channels(one_missing, "agg");
    REQUIRE(id.size() == 10);
    for (const auto& s : id) CHECK(*s.power_w == 42.0);

    auto prod = constant("pv", 0, 10, 5.0);
    for (auto& s : prod) s.direction = Direction::production;
    std::vector<std::vector<PowerSample>> mixed{constant("a", 0, 10, 1.0), prod};
    CHECK_THROWS_AS(merge_channels(mixed, "agg"), ValidationError);
  }

  TEST_CASE("merge with staggered timestamps matches a per-second reference") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> w(0.0, 100.0);
    std::uniform_int_distribution<int> step(1, 4);
    std::vector<std::vector<PowerSample>> chans(2);
    for (int c = 0; c < 2; ++c) {
      for (std::int64_t t = c; t < 400; t += step(rng)) chans[c].push_back({"c" + std::to_string(c), from_unix(t), w(rng)});
    }
    const auto merged = merge_channels(chans, "agg");
    // reference: at each merged grid point, sum the latest reading of each channel if <= 5 s old
    for (const auto& m : merged) {
      const auto t = to_unix(m.timestamp);
      double sum = 0;
      bool any = false;
      for (const auto& ch : chans) {
        const PowerSample* last = nullptr;
        for (const auto& s : ch) {
          if (to_unix(s.timestamp) <= t) last = &s;
        }
        if (last && t - to_unix(last->timestamp) <= 5) {
          sum += *last->power_w;
          any = true;
        }
      }
      REQUIRE(any == m.power_w.has_value());
      if (any) CHECK(*m.power_w == doctest::Approx(sum).epsilon(1e-12));
    }
    std::set<std::int64_t> grid;
    for (const auto& ch : chans) {
      for (const auto& s : ch) grid.insert(to_unix(s.timestamp));
    }
    CHECK(merged.size() == grid.size());
  }

  TEST_CASE("weighted merge") {
    std::vector<std::vector<PowerSample>> two{constant("a", 0, 3, 10.0), constant("b", 0, 3, 20.0)};
    const std::vector<double> w{1.0, -0.5};
    const auto m = merge_channels(two, w, "agg");
    CHECK(*m[0].power_w == 0.0);
  }

  TEST_CASE("coverage: hold rule and gap accounting") {
    std::vector<PowerSample> s = values("a", 0, {10, 10, 10});
    s.push_back({"a", from_unix(5), 20.0});   // 3 s after the last: bridged
    s.push_back({"a", from_unix(30), 30.0});  // 25 s later: not bridged
    const auto c = coverage(s);
    REQUIRE(c.size() == 5);
    CHECK(c[2].to == from_unix(5));
    CHECK(c[3].to == from_unix(6));
    CHECK(observed_seconds(c, from_unix(0), from_unix(100)) == Seconds{7});
    CHECK(integrate_kwh(c, from_unix(0), from_unix(100)) == doctest::Approx((10 * 5 + 20 + 30) / 3.6e6));
    CHECK(mean_power_w(c, from_unix(0), from_unix(100)) == doctest::Approx(100.0 / 7));
    CHECK(mean_power_w(c, from_unix(50), from_unix(100)) == 0.0);
    // a constant trace averages to exactly its level
    const auto flat = coverage(constant("f", 0, 1000, 130.0, 60));
    CHECK(mean_power_w(flat, from_unix(0), from_unix(60000)) == 130.0);
  }

  TEST_CASE("native resolution") {
    CHECK(native_resolution(constant("a", 0, 5, 1.0, 60)) == Seconds{60});
    CHECK(native_resolution(constant("a", 0, 1, 1.0)) == Seconds{1});
  }

  TEST_CASE("group by channel is stable") {
    const auto r = parse_trace("timestamp,a,b\n100,1,2\n101,3,4\n");
    const auto g = group_by_channel(r.samples);
    REQUIRE(g.size() == 2);
    CHECK(*g.at("a")[1].power_w == 3.0);
  }
}
