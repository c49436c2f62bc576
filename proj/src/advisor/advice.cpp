#include "hems/advisor/advice.hpp"

#include <fmt/format.h>

#include "hems/error.hpp"

namespace hems {

std::string_view to_string(AdviceType t) {
  switch (t) {
    case AdviceType::diagnostics: return "diagnostics";
    case AdviceType::shifting: return "shifting";
    case AdviceType::standby: return "standby";
    case AdviceType::curtailment: return "curtailment";
  }
  return "standby";
}

std::string_view to_string(FeedbackAction a) {
  switch (a) {
    case FeedbackAction::accept: return "accept";
    case FeedbackAction::converted: return "converted";
    case FeedbackAction::reject: return "reject";
  }
  return "accept";
}

std::string_view to_string(RejectCause c) {
  return c == RejectCause::device_reluctance ? "device_reluctance" : "advice_mistrust";
}

AdviceType parse_advice_type(std::string_view s) {
  if (s == "diagnostics") return AdviceType::diagnostics;
  if (s == "shifting") return AdviceType::shifting;
  if (s == "standby") return AdviceType::standby;
  if (s == "curtailment") return AdviceType::curtailment;
  throw ValidationError(fmt::format("unknown advice type '{}'", s));
}

FeedbackAction parse_feedback_action(std::string_view s) {
  if (s == "accept") return FeedbackAction::accept;
  if (s == "converted") return FeedbackAction::converted;
  if (s == "reject") return FeedbackAction::reject;
  throw ValidationError(fmt::format("unknown feedback action '{}' (accept|converted|reject)", s));
}

RejectCause parse_reject_cause(std::string_view s) {
  if (s == "device_reluctance") return RejectCause::device_reluctance;
  if (s == "advice_mistrust") return RejectCause::advice_mistrust;
  throw ValidationError(fmt::format("unknown reject cause '{}' (device_reluctance|advice_mistrust)", s));
}

std::string make_advice_id(std::string_view user_id, AdviceType type, std::string_view device_id) {
  return fmt::format("{}.{}.{}", user_id, to_string(type), device_id);
}

void FeedbackRecord::validate() const {
  if (action == FeedbackAction::reject && !cause) throw ValidationError("a rejection needs a cause");
  if (action != FeedbackAction::reject && cause) throw ValidationError("only rejections carry a cause");
}

void AdvisorConfig::validate() const {
  if (!(tau1 > 0.0)) throw ValidationError("tau1 must be positive");
}

}  // namespace hems
