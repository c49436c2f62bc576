#include <doctest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "small_home.hpp"

using json = nlohmann::json;
using fixtures::quote;
using fixtures::run;

namespace {

std::string cli() { return quote(fixtures::cli_path()); }

struct CliHome {
  fixtures::TempDir dir{"cli"};
  std::string base;

  CliHome() {
    const auto cfg = fixtures::write_config(dir.path(), fixtures::small_home_spec());
    base = cli() + " --config " + quote(cfg.string()) + " --now 2014-09-04T10:00:00Z";
    std::map<std::string, std::vector<hems::PowerSample>> by;
    for (auto& s : fixtures::small_home_samples()) by[s.channel_id].push_back(s);
    std::vector<std::vector<hems::PowerSample>> chans;
    for (auto& [id, v] : by) chans.push_back(std::move(v));
    fixtures::write_text(dir / "trace.csv", fixtures::to_csv(chans));
  }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit nonzero") {
    CHECK(run(cli()).exit_code != 0);
    CHECK(run(cli() + " bogus").exit_code != 0);
    CHECK(run(cli() + " savings --calc nothing").exit_code != 0);
    CHECK(run(cli() + " analyze --report itemization").exit_code != 0);  // no config
    CHECK(run(cli() + " --help").exit_code == 0);
  }

  TEST_CASE("savings calculators") {
    const auto tariff = quote((fixtures::data_dir() / "tariff_it.txt").string());
    auto r = run(cli() + " savings --calc shift --l 19 --from T1 --to T2 --category C1 --tariff " + tariff);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find(",0.1210\n") != std::string::npos);
    r = run(cli() + " --format json savings --calc standby --power-w 30 --weekday-hours 3 --weekend-hours 24");
    const auto j = json::parse(r.out);
    CHECK(j["kwh_year"].get<double>() == doctest::Approx(98.28));
    r = run(cli() + " tariff category --kwh 1800 --kwh 1801 --tariff " + tariff);
    CHECK(r.out == "kwh_year,category\n1800,C1\n1801,C2\n");
  }

  TEST_CASE("ingest detect analyze advise") {
    CliHome h;
    const auto trace = quote((h.dir / "trace.csv").string());
    auto r = run(h.base + " --format json ingest " + trace);
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j[0]["inserted"] == 3 * (fixtures::kHomeNow - fixtures::kHomeStart) / 60);
    r = run(h.base + " --format json ingest " + trace);
    j = json::parse(r.out);
    CHECK(j[0]["inserted"] == 0);
    CHECK(j[0]["duplicates"] == 3 * (fixtures::kHomeNow - fixtures::kHomeStart) / 60);

    fixtures::write_text(h.dir / "bad.csv", "timestamp,wm\n1409522400,1\nnope,2\n");
    CHECK(run(h.base + " ingest " + quote((h.dir / "bad.csv").string())).exit_code == 1);
    CHECK(run(h.base + " ingest " + quote((h.dir / "missing.csv").string())).exit_code == 1);

    CHECK(run(h.base + " detect").exit_code == 0);
    r = run(h.base + " --format json analyze --report events --device wm");
    j = json::parse(r.out);
    REQUIRE(j.size() == 4);
    CHECK(j[0]["t_start"] == "2014-09-01T08:00:00Z");
    CHECK(j[0]["energy_kwh"].get<double>() == doctest::Approx(0.5));

    r = run(h.base + " --format json analyze --report itemization --period week");
    REQUIRE(r.exit_code == 0);

    const auto first = run(h.base + " advise");
    const auto second = run(h.base + " advise");
    CHECK(first.exit_code == 0);
    CHECK(first.out == second.out);
    CHECK(first.out.rfind("seed,rank,advice_id,advice_type,device_type,device_id,score,saving_eur,message\n", 0) == 0);

    fixtures::write_text(h.dir / "fb.json", R"([{"advice_id":"anna.standby.tv","action":"converted"}])");
    r = run(h.base + " --format json advise --apply-feedback " + quote((h.dir / "fb.json").string()));
    CHECK(r.exit_code == 0);
    j = json::parse(r.out);
    REQUIRE(j["advices"].size() == 1);
    for (const auto& a : j["advices"]) CHECK(a["advice_id"] != "anna.standby.tv");
    // feedback on a disabled advice fails
    CHECK(run(h.base + " advise --apply-feedback " + quote((h.dir / "fb.json").string())).exit_code != 0);

    const auto out = h.dir / "report.csv";
    CHECK(run(h.base + " --out " + quote(out.string()) + " analyze --report summary --date 2014-09-01").exit_code == 0);
    CHECK(fixtures::read_text(out).find("2014-09-01") != std::string::npos);
  }
}
