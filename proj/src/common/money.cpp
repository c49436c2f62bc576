#include "hems/money.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

namespace hems {

Money Money::from_eur(double eur) {
  return Money{static_cast<std::int64_t>(std::llround(eur * static_cast<double>(kPerEur)))};
}

std::string Money::to_string() const {
  // Round half away from zero at the cent.
  const std::int64_t cents_abs = (std::llabs(mc_) + 500) / 1000;
  return fmt::format("{}{}.{:02d}", mc_ < 0 && cents_abs != 0 ? "-" : "", cents_abs / 100, cents_abs % 100);
}

}  // namespace hems
