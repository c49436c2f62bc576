#include "hems/kernels/parallel.hpp"

#include "hems/error.hpp"

namespace hems::reference {

std::vector<std::vector<UsageEvent>> detect_all(std::span<const kernels::DeviceTrace> traces) {
  std::vector<std::vector<UsageEvent>> out;
  out.reserve(traces.size());
  for (const auto& t : traces) out.push_back(detect_events(t.samples, t.config));
  return out;
}

void classify_slots(std::span<const Timestamp> ts, const TariffContext& ctx, std::span<std::uint8_t> out) {
  if (out.size() != ts.size()) throw ValidationError("classify_slots output size mismatch");
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = static_cast<std::uint8_t>(classify_slot_index(ts[i], ctx));
}

std::vector<double> channel_energy_kwh(std::span<const std::span<const PowerSample>> channels, Timestamp from,
                                       Timestamp to, GapPolicy policy) {
  std::vector<double> out;
  out.reserve(channels.size());
  for (const auto& ch : channels) out.push_back(integrate_kwh(ch, from, to, policy));
  return out;
}

void price_events(std::span<UsageEvent> events, const TariffContext& ctx, std::string_view category) {
  for (auto& e : events) e.cost_eur = cost_of_event(e, ctx, category);
}

}  // namespace hems::reference
