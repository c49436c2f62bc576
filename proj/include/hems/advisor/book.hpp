#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hems/advisor/advice.hpp"

namespace hems {

/// Deterministic tie-break position of an advice for a seed.
std::uint64_t tie_key(std::string_view advice_id, std::uint64_t seed);

/// Descending score; equal scores ordered by tie_key. The output depends only
/// on the (id, score) set and the seed, not on input order.
std::vector<Advice> rank_advices(std::vector<Advice> advices, std::uint64_t seed);

/// Advice state of one user: scores, enablement, and the feedback log.
/// Not synchronized; callers serialize mutations per user.
class AdviceBook {
 public:
  explicit AdviceBook(std::string user_id) : user_id_(std::move(user_id)) {}

  /// Folds a generator run in. Known advices keep score and enabled flag and
  /// take the fresh parameters; the candidate set becomes the current one.
  void merge(const std::vector<Advice>& candidates);

  /// converted disables for good; accept scores +1; reject scores -1 on every
  /// enabled advice sharing the advice type (advice_mistrust) or the device
  /// type (device_reluctance). ConflictError on disabled advices,
  /// NotFoundError on unknown ones.
  void apply_feedback(const FeedbackRecord& record);

  /// Current, enabled, ranked, at most max_displayed.
  std::vector<Advice> active(std::size_t max_displayed, std::uint64_t seed) const;

  const Advice* find(const std::string& advice_id) const;
  std::vector<Advice> all() const;
  const std::vector<FeedbackRecord>& log() const { return log_; }
  const std::string& user_id() const { return user_id_; }

  /// Ids from the latest merge.
  const std::set<std::string>& current() const { return current_; }
  void restore(std::vector<Advice> advices, std::vector<FeedbackRecord> log, std::set<std::string> current);

 private:
  std::string user_id_;
  std::map<std::string, Advice> advices_;
  std::set<std::string> current_;
  std::vector<FeedbackRecord> log_;
};

}  // namespace hems
