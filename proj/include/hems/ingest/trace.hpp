#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hems/core/types.hpp"
#include "hems/ingest/series.hpp"

namespace hems {

struct TraceParseOptions {
  /// Channels not listed default to consumption.
  std::map<std::string, Direction, std::less<>> directions;
};

struct TraceParseResult {
  std::vector<std::string> channels;  // header order
  /// Row-major: timestamp ascending, then header column order.
  std::vector<PowerSample> samples;
  std::size_t rows = 0;            // data rows seen
  std::size_t malformed_rows = 0;  // skipped
  std::size_t duplicate_rows = 0;  // later duplicates of a timestamp, dropped
  bool reordered = false;
  std::vector<std::string> warnings;
};

/// CSV trace: header "timestamp,<channel>...", unix-second timestamps,
/// empty cell or NULL = missing. Throws ParseError when the header is absent.
TraceParseResult parse_trace(std::string_view text, const TraceParseOptions& options = {});

/// Inverse of parse_trace for any sample set: union timestamp grid, channels
/// in first-appearance order, absent cells written empty.
std::string serialize_trace(std::span<const PowerSample> samples);

/// Bin means on an epoch-aligned grid of `period`. Samples: one channel, sorted.
/// Bins holding only missing readings yield a missing sample; empty bins are omitted.
std::vector<PowerSample> resample(std::span<const PowerSample> samples, Seconds period);

/// Pointwise weighted sum on the union time grid. Channels without a reading
/// at a grid point contribute their last observation when at most
/// `policy.max_hold` old and are skipped otherwise; a point with no
/// contributing channel is missing. Throws ValidationError on mixed directions.
std::vector<PowerSample> merge_channels(std::span<const std::vector<PowerSample>> channels,
                                        std::span<const double> weights,
                                        const std::string& aggregate_id, GapPolicy policy = {});
std::vector<PowerSample> merge_channels(std::span<const std::vector<PowerSample>> channels,
                                        const std::string& aggregate_id, GapPolicy policy = {});

}  // namespace hems
