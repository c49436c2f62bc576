#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hems/core/types.hpp"
#include "hems/detect/detector.hpp"
#include "hems/tariff/pricing.hpp"

// Data-parallel batch kernels. Each has a serial twin in hems::reference
// with identical results; tests compare the two and bench/ times them.
namespace hems::kernels {

struct DeviceTrace {
  std::span<const PowerSample> samples;
  DetectorConfig config;
};

/// detect_events per device, devices in parallel. Output order follows input.
std::vector<std::vector<UsageEvent>> detect_all(std::span<const DeviceTrace> traces);

/// Slot index (into scheme.slots()) per timestamp. `out` must match `ts` in size.
void classify_slots(std::span<const Timestamp> ts, const TariffContext& ctx, std::span<std::uint8_t> out);

/// kWh of each channel over [from, to) under the gap policy.
std::vector<double> channel_energy_kwh(std::span<const std::span<const PowerSample>> channels, Timestamp from,
                                       Timestamp to, GapPolicy policy = {});

/// Fills cost_eur of every event.
void price_events(std::span<UsageEvent> events, const TariffContext& ctx, std::string_view category);

/// Worker threads OpenMP will use.
int thread_count();

}  // namespace hems::kernels

namespace hems::reference {

std::vector<std::vector<UsageEvent>> detect_all(std::span<const kernels::DeviceTrace> traces);
void classify_slots(std::span<const Timestamp> ts, const TariffContext& ctx, std::span<std::uint8_t> out);
std::vector<double> channel_energy_kwh(std::span<const std::span<const PowerSample>> channels, Timestamp from,
                                       Timestamp to, GapPolicy policy = {});
void price_events(std::span<UsageEvent> events, const TariffContext& ctx, std::string_view category);

}  // namespace hems::reference
