#pragma once

#include "sheriff/core/rational.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sheriff {

// Exact decimal with at most four fraction digits, stored as an integer
// count of ten-thousandths. Used for every monetary amount.
class Decimal {
 public:
  static constexpr int kMaxFractionDigits = 4;
  static constexpr std::int64_t kScale = 10000;

  constexpr Decimal() = default;

  static constexpr Decimal from_units(std::int64_t units) {
    Decimal d;
    d.units_ = units;
    return d;
  }
  static constexpr Decimal from_integer(std::int64_t whole) {
    return from_units(whole * kScale);
  }

  // Accepts an optional sign, digits, and an optional '.' followed by
  // 1..4 digits. No grouping, no exponent.
  static std::optional<Decimal> try_parse(std::string_view text);
  static Decimal parse(std::string_view text);

  // Exact conversion; throws InvalidArgument when the value needs more
  // than four fraction digits.
  static Decimal from_rational(const Rational& value);

  constexpr std::int64_t units() const { return units_; }
  Rational to_rational() const;
  double to_double() const;

  // Renders with exactly `fraction_digits` digits (half away from zero).
  std::string to_string(int fraction_digits) const;
  // Renders with at least two fraction digits and no trailing zeros
  // beyond that.
  std::string to_string() const;

  // Number of fraction digits actually needed (0..4).
  int scale_needed() const;

  constexpr bool is_positive() const { return units_ > 0; }

  friend constexpr auto operator<=>(const Decimal&, const Decimal&) = default;
  friend constexpr Decimal operator+(Decimal a, Decimal b) { return from_units(a.units_ + b.units_); }
  friend constexpr Decimal operator-(Decimal a, Decimal b) { return from_units(a.units_ - b.units_); }
  friend constexpr Decimal operator*(Decimal a, std::int64_t k) { return from_units(a.units_ * k); }

 private:
  std::int64_t units_ = 0;
};

}  // namespace sheriff
