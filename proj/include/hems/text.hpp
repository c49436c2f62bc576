#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hems {

std::string read_file(const std::filesystem::path& path);
std::vector<std::string_view> split_lines(std::string_view text);
/// Split on any run of spaces/tabs.
std::vector<std::string_view> split_ws(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view s);
/// Drops everything from '#' and trims.
std::string_view strip_comment(std::string_view line);
/// Strict double parse of the whole token.
bool parse_double(std::string_view s, double& out);

}  // namespace hems
