#include "sheriff/core/decimal.hpp"

#include "sheriff/core/errors.hpp"

#include <cctype>
#include <cstdlib>
#include <limits>

namespace sheriff {

std::optional<Decimal> Decimal::try_parse(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  constexpr std::int64_t kLimit = std::numeric_limits<std::int64_t>::max() / 10 - 9;
  std::int64_t whole = 0;
  std::size_t whole_digits = 0;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    if (whole > kLimit / kScale) return std::nullopt;
    whole = whole * 10 + (text[i] - '0');
    ++whole_digits;
  }
  std::int64_t fraction = 0;
  int fraction_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      if (++fraction_digits > kMaxFractionDigits) return std::nullopt;
      fraction = fraction * 10 + (text[i] - '0');
    }
    if (fraction_digits == 0) return std::nullopt;
  }
  if (i != text.size() || whole_digits == 0) return std::nullopt;
  for (int k = fraction_digits; k < kMaxFractionDigits; ++k) fraction *= 10;
  std::int64_t units = whole * kScale + fraction;
  return from_units(negative ? -units : units);
}

Decimal Decimal::parse(std::string_view text) {
  auto d = try_parse(text);
  if (!d) throw InvalidArgument("not a decimal amount: '" + std::string(text) + "'");
  return *d;
}

Decimal Decimal::from_rational(const Rational& value) {
  Rational scaled = value * kScale;
  if (boost::multiprecision::denominator(scaled) != 1) {
    throw InvalidArgument("value needs more than four fraction digits");
  }
  return from_units(boost::multiprecision::numerator(scaled).convert_to<std::int64_t>());
}

Rational Decimal::to_rational() const { return Rational(units_, kScale); }

double Decimal::to_double() const { return static_cast<double>(units_) / kScale; }

std::string Decimal::to_string(int fraction_digits) const {
  return format_fixed(to_rational(), fraction_digits);
}

int Decimal::scale_needed() const {
  std::int64_t u = units_ < 0 ? -units_ : units_;
  int digits = kMaxFractionDigits;
  while (digits > 0 && u % 10 == 0) {
    u /= 10;
    --digits;
  }
  return digits;
}

std::string Decimal::to_string() const {
  int digits = scale_needed();
  return to_string(digits < 2 ? 2 : digits);
}

}  // namespace sheriff
