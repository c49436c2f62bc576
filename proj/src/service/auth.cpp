#include "hems/service/auth.hpp"

#include <algorithm>
#include <cctype>

#include "hems/text.hpp"

namespace hems {

bool constant_time_equal(std::string_view a, std::string_view b) {
  const std::size_t n = std::max(a.size(), b.size());
  unsigned diff = a.size() == b.size() ? 0u : 1u;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char x = i < a.size() ? static_cast<unsigned char>(a[i]) : 0;
    const unsigned char y = i < b.size() ? static_cast<unsigned char>(b[i]) : 0;
    diff |= static_cast<unsigned>(x ^ y);
  }
  return diff == 0;
}

TokenAuthenticator::TokenAuthenticator(std::vector<ApiToken> tokens) : tokens_(std::move(tokens)) {}

std::optional<Principal> TokenAuthenticator::authenticate(std::string_view authorization) const {
  authorization = trim(authorization);
  constexpr std::string_view kScheme = "Bearer ";
  if (authorization.size() <= kScheme.size()) return std::nullopt;
  for (std::size_t i = 0; i < kScheme.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(authorization[i])) !=
        std::tolower(static_cast<unsigned char>(kScheme[i]))) {
      return std::nullopt;
    }
  }
  const auto presented = trim(authorization.substr(kScheme.size()));
  if (presented.empty()) return std::nullopt;

  const ApiToken* match = nullptr;
  for (const auto& t : tokens_) {
    if (constant_time_equal(t.token, presented) && !match) match = &t;
  }
  if (!match) return std::nullopt;
  return Principal{match->user_id, match->household_id, match->can_read, match->can_write};
}

}  // namespace hems
