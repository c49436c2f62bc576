// Parallel kernels against their serial twins.
//   hems_bench --benchmark_filter=detect

#include <benchmark/benchmark.h>

#include <random>

#include "fixtures.hpp"
#include "hems/kernels/parallel.hpp"

using namespace hems;

namespace {

constexpr std::int64_t kT0 = 1409522400;

const TariffContext& context() {
  static const TariffContext ctx{TariffScheme::load(fixtures::data_dir() / "tariff_it.txt"),
                                 HolidayCalendar::load(fixtures::data_dir() / "holidays_it.txt"),
                                 Timezone::from_name("Europe/Rome")};
  return ctx;
}

const std::vector<std::vector<PowerSample>>& traces(std::size_t n) {
  static std::map<std::size_t, std::vector<std::vector<PowerSample>>> cache;
  auto& v = cache[n];
  if (v.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      v.push_back(fixtures::random_trace("dev" + std::to_string(i), kT0, 6 * 3600, 100 + static_cast<unsigned>(i)));
    }
  }
  return v;
}

std::vector<kernels::DeviceTrace> inputs(std::size_t n) {
  std::vector<kernels::DeviceTrace> in;
  for (const auto& t : traces(n)) in.push_back({t, DetectorConfig{}});
  return in;
}

std::vector<UsageEvent> events(std::size_t n) {
  std::vector<UsageEvent> flat;
  for (auto& v : reference::detect_all(inputs(n))) flat.insert(flat.end(), v.begin(), v.end());
  return flat;
}

std::vector<Timestamp> stamps(std::size_t n) {
  std::mt19937_64 rng(7);
  std::vector<Timestamp> ts(n);
  for (auto& t : ts) t = from_unix(kT0 + static_cast<std::int64_t>(rng() % (730LL * 86400)));
  return ts;
}

template <bool Parallel>
void detect(benchmark::State& st) {
  const auto in = inputs(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    auto out = Parallel ? kernels::detect_all(in) : reference::detect_all(in);
    benchmark::DoNotOptimize(out);
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void price(benchmark::State& st) {
  const auto base = events(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    auto ev = base;
    Parallel ? kernels::price_events(ev, context(), "C2") : reference::price_events(ev, context(), "C2");
    benchmark::DoNotOptimize(ev.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(base.size()));
}

template <bool Parallel>
void classify(benchmark::State& st) {
  const auto ts = stamps(static_cast<std::size_t>(st.range(0)));
  std::vector<std::uint8_t> out(ts.size());
  for (auto _ : st) {
    Parallel ? kernels::classify_slots(ts, context(), out) : reference::classify_slots(ts, context(), out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void energy(benchmark::State& st) {
  const auto& tr = traces(static_cast<std::size_t>(st.range(0)));
  std::vector<std::span<const PowerSample>> chans(tr.begin(), tr.end());
  const auto from = from_unix(kT0), to = from_unix(kT0 + 6 * 3600);
  for (auto _ : st) {
    auto out = Parallel ? kernels::channel_energy_kwh(chans, from, to) : reference::channel_energy_kwh(chans, from, to);
    benchmark::DoNotOptimize(out);
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(detect<false>)->Name("detect/serial")->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(detect<true>)->Name("detect/parallel")->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(price<false>)->Name("price/serial")->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(price<true>)->Name("price/parallel")->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(classify<false>)->Name("classify/serial")->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(classify<true>)->Name("classify/parallel")->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(energy<false>)->Name("energy/serial")->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(energy<true>)->Name("energy/parallel")->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
