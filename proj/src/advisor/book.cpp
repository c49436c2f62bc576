#include "hems/advisor/book.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "hems/error.hpp"

namespace hems {
namespace {

// FNV-1a followed by the splitmix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t tie_key(std::string_view advice_id, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : advice_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix(h ^ mix(seed));
}

std::vector<Advice> rank_advices(std::vector<Advice> advices, std::uint64_t seed) {
  std::vector<std::pair<std::uint64_t, Advice>> keyed;
  keyed.reserve(advices.size());
  for (auto& a : advices) keyed.emplace_back(tie_key(a.advice_id, seed), std::move(a));
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) {
    if (x.second.score != y.second.score) return x.second.score > y.second.score;
    if (x.first != y.first) return x.first < y.first;
    return x.second.advice_id < y.second.advice_id;
  });
  std::vector<Advice> out;
  out.reserve(keyed.size());
  for (auto& [k, a] : keyed) out.push_back(std::move(a));
  return out;
}

void AdviceBook::merge(const std::vector<Advice>& candidates) {
  current_.clear();
  for (const auto& c : candidates) {
    auto it = advices_.find(c.advice_id);
    if (it == advices_.end()) {
      Advice fresh = c;
      fresh.enabled = true;
      fresh.score = 0;
      advices_.emplace(fresh.advice_id, std::move(fresh));
    } else {
      it->second.params = c.params;
      it->second.saving_eur = c.saving_eur;
      it->second.device_type = c.device_type;
    }
    current_.insert(c.advice_id);
  }
}

void AdviceBook::apply_feedback(const FeedbackRecord& record) {
  record.validate();
  if (record.user_id != user_id_) throw ValidationError("feedback belongs to another user");
  auto it = advices_.find(record.advice_id);
  if (it == advices_.end()) throw NotFoundError(fmt::format("unknown advice '{}'", record.advice_id));
  Advice& target = it->second;
  if (!target.enabled) throw ConflictError(fmt::format("advice '{}' is disabled", record.advice_id));

  switch (record.action) {
    case FeedbackAction::converted:
      target.enabled = false;
      break;
    case FeedbackAction::accept:
      ++target.score;
      break;
    case FeedbackAction::reject: {
      const auto type = target.type;
      const auto device_type = target.device_type;
      for (auto& [id, a] : advices_) {
        if (!a.enabled) continue;
        const bool hit = *record.cause == RejectCause::advice_mistrust ? a.type == type
                                                                       : a.device_type == device_type;
        if (hit) --a.score;
      }
      break;
    }
  }
  log_.push_back(record);
}

std::vector<Advice> AdviceBook::active(std::size_t max_displayed, std::uint64_t seed) const {
  std::vector<Advice> candidates;
  std::set<std::pair<AdviceType, std::string>> seen;
  for (const auto& id : current_) {
    const auto& a = advices_.at(id);
    if (!a.enabled) continue;
    if (!seen.emplace(a.type, a.device_id).second) continue;
    candidates.push_back(a);
  }
  auto ranked = rank_advices(std::move(candidates), seed);
  if (ranked.size() > max_displayed) ranked.resize(max_displayed);
  return ranked;
}

const Advice* AdviceBook::find(const std::string& advice_id) const {
  auto it = advices_.find(advice_id);
  return it == advices_.end() ? nullptr : &it->second;
}

std::vector<Advice> AdviceBook::all() const {
  std::vector<Advice> out;
  for (const auto& [id, a] : advices_) out.push_back(a);
  return out;
}

void AdviceBook::restore(std::vector<Advice> advices, std::vector<FeedbackRecord> log,
                         std::set<std::string> current) {
  advices_.clear();
  for (auto& a : advices) advices_.emplace(a.advice_id, std::move(a));
  current_.clear();
  for (auto& id : current) {
    if (advices_.count(id)) current_.insert(std::move(id));
  }
  log_ = std::move(log);
}

}  // namespace hems
