#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hems {

struct ApiToken {
  std::string token;
  std::string user_id;
  std::string household_id;
  bool can_read = true;
  bool can_write = false;
};

struct Principal {
  std::string user_id;
  std::string household_id;
  bool can_read = false;
  bool can_write = false;
};

/// Equality whose running time depends only on the longer length.
bool constant_time_equal(std::string_view a, std::string_view b);

class TokenAuthenticator {
 public:
  explicit TokenAuthenticator(std::vector<ApiToken> tokens);
  /// From an "Authorization: Bearer <token>" header value. Every token is
  /// compared, so timing does not reveal which one matched.
  std::optional<Principal> authenticate(std::string_view authorization) const;

 private:
  std::vector<ApiToken> tokens_;
};

}  // namespace hems
