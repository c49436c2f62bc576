#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "hems/time.hpp"

namespace hems {

enum class AdviceType { diagnostics, shifting, standby, curtailment };
enum class FeedbackAction { accept, converted, reject };
enum class RejectCause { device_reluctance, advice_mistrust };

std::string_view to_string(AdviceType t);
std::string_view to_string(FeedbackAction a);
std::string_view to_string(RejectCause c);
AdviceType parse_advice_type(std::string_view s);
FeedbackAction parse_feedback_action(std::string_view s);
RejectCause parse_reject_cause(std::string_view s);

struct Advice {
  std::string advice_id;  // stable identity: user/type/device
  std::string user_id;
  AdviceType type = AdviceType::standby;
  std::string device_type;
  std::string device_id;
  std::map<std::string, std::string> params;  // template placeholders
  double saving_eur = 0.0;
  bool enabled = true;
  int score = 0;

  bool operator==(const Advice&) const = default;
};

std::string make_advice_id(std::string_view user_id, AdviceType type, std::string_view device_id);

/// One click on the advisor widget. A cause accompanies rejections only.
struct FeedbackRecord {
  std::string user_id;
  std::string advice_id;
  FeedbackAction action = FeedbackAction::accept;
  std::optional<RejectCause> cause;
  Timestamp time;

  void validate() const;
  bool operator==(const FeedbackRecord&) const = default;
};

struct AdvisorConfig {
  double tau1 = 0.30;  // diagnostics threshold over the type mean
  std::size_t max_displayed = 5;
  std::uint64_t rng_seed = 42;
  /// Shifting advices saving at most this much per month are suppressed.
  /// Negative disables suppression of positive savings.
  double min_shift_saving_eur = 0.01;

  void validate() const;
};

}  // namespace hems
