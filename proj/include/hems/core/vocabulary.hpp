#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

namespace hems {

/// Controlled vocabulary: one term per line, '#' starts a comment.
class Vocabulary {
 public:
  Vocabulary() = default;
  static Vocabulary parse(std::string_view text);
  static Vocabulary load(const std::filesystem::path& path);

  bool contains(std::string_view term) const { return terms_.find(term) != terms_.end(); }
  const std::set<std::string, std::less<>>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

 private:
  std::set<std::string, std::less<>> terms_;
};

}  // namespace hems
