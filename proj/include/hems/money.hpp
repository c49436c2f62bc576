#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace hems {

/// EUR amount held as integer milli-cents (1 EUR = 100'000).
class Money {
 public:
  static constexpr std::int64_t kPerEur = 100'000;

  constexpr Money() = default;
  static constexpr Money from_millicents(std::int64_t mc) { return Money{mc}; }
  static Money from_eur(double eur);

  constexpr std::int64_t millicents() const { return mc_; }
  constexpr double eur() const { return static_cast<double>(mc_) / kPerEur; }

  /// Two-decimal rendering, "9.50".
  std::string to_string() const;

  constexpr Money operator+(Money o) const { return Money{mc_ + o.mc_}; }
  constexpr Money operator-(Money o) const { return Money{mc_ - o.mc_}; }
  constexpr Money& operator+=(Money o) { mc_ += o.mc_; return *this; }
  constexpr Money& operator-=(Money o) { mc_ -= o.mc_; return *this; }
  constexpr auto operator<=>(const Money&) const = default;

 private:
  constexpr explicit Money(std::int64_t mc) : mc_(mc) {}
  std::int64_t mc_ = 0;
};

}  // namespace hems
