#include "hems/core/vocabulary.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "hems/error.hpp"
#include "hems/text.hpp"

namespace hems {

Vocabulary Vocabulary::parse(std::string_view text) {
  Vocabulary v;
  for (auto line : split_lines(text)) {
    line = strip_comment(line);
    if (!line.empty()) v.terms_.emplace(line);
  }
  return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

}  // namespace hems
