#include "hems/advisor/templates.hpp"

#include <fmt/format.h>

#include "hems/error.hpp"
#include "hems/text.hpp"

namespace hems {

MessageTemplates MessageTemplates::parse(std::string_view text) {
  MessageTemplates t;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(fmt::format("template line {}: expected 'type = text'", line_no));
    }
    t.text_[parse_advice_type(trim(line.substr(0, eq)))] = std::string{trim(line.substr(eq + 1))};
  }
  return t;
}

MessageTemplates MessageTemplates::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::string MessageTemplates::render(const Advice& advice) const {
  auto it = text_.find(advice.type);
  if (it == text_.end()) return std::string{to_string(advice.type)};
  const auto& tpl = it->second;
  std::string out;
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '{') {
      auto close = tpl.find('}', i);
      if (close != std::string::npos) {
        auto key = tpl.substr(i + 1, close - i - 1);
        auto p = advice.params.find(key);
        if (p != advice.params.end()) {
          out += p->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tpl[i++];
  }
  return out;
}

}  // namespace hems
