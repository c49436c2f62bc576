#include "hems/kernels/parallel.hpp"

#include <exception>

#include <omp.h>

#include "hems/error.hpp"

namespace hems::kernels {
namespace {

// Runs body(i) for i in [0, n) across threads; rethrows the first failure.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<std::vector<UsageEvent>> detect_all(std::span<const DeviceTrace> traces) {
  std::vector<std::vector<UsageEvent>> out(traces.size());
  parallel_for(traces.size(), [&](std::size_t i) { out[i] = detect_events(traces[i].samples, traces[i].config); });
  return out;
}

void classify_slots(std::span<const Timestamp> ts, const TariffContext& ctx, std::span<std::uint8_t> out) {
  if (out.size() != ts.size()) throw ValidationError("classify_slots output size mismatch");
  const auto n = static_cast<std::int64_t>(ts.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(classify_slot_index(ts[static_cast<std::size_t>(i)], ctx));
  }
}

std::vector<double> channel_energy_kwh(std::span<const std::span<const PowerSample>> channels, Timestamp from,
                                       Timestamp to, GapPolicy policy) {
  std::vector<double> out(channels.size(), 0.0);
  parallel_for(channels.size(), [&](std::size_t i) { out[i] = integrate_kwh(channels[i], from, to, policy); });
  return out;
}

void price_events(std::span<UsageEvent> events, const TariffContext& ctx, std::string_view category) {
  parallel_for(events.size(), [&](std::size_t i) { events[i].cost_eur = cost_of_event(events[i], ctx, category); });
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace hems::kernels
