#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "hems/advisor/advice.hpp"

namespace hems {

/// "type = text with {placeholders}" per line.
class MessageTemplates {
 public:
  static MessageTemplates parse(std::string_view text);
  static MessageTemplates load(const std::filesystem::path& path);

  /// Unknown placeholders are left verbatim.
  std::string render(const Advice& advice) const;

 private:
  std::map<AdviceType, std::string> text_;
};

}  // namespace hems
