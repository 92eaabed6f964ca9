#include "sheriff/core/rational.hpp"

#include "sheriff/core/errors.hpp"

#include <cctype>

namespace sheriff {

using boost::multiprecision::cpp_int;

Rational pow10(int exponent) {
  cpp_int p = 1;
  for (int i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) p *= 10;
  return exponent >= 0 ? Rational(p) : Rational(cpp_int(1), p);
}

Rational parse_rational(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  cpp_int mantissa = 0;
  int fraction_digits = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      seen_digit = true;
      if (seen_point) ++fraction_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      throw InvalidArgument("not a decimal literal: '" + std::string(text) + "'");
    }
  }
  if (!seen_digit) throw InvalidArgument("not a decimal literal: '" + std::string(text) + "'");
  Rational r = Rational(mantissa) / pow10(fraction_digits);
  return negative ? -r : r;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational round_to(const Rational& value, int fraction_digits) {
  Rational scaled = value * pow10(fraction_digits);
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  cpp_int num = boost::multiprecision::numerator(scaled);
  cpp_int den = boost::multiprecision::denominator(scaled);
  cpp_int q = num / den;
  cpp_int rem = num % den;
  if (rem * 2 >= den) ++q;
  Rational out = Rational(q) / pow10(fraction_digits);
  return negative ? -out : out;
}

std::string format_fixed(const Rational& value, int fraction_digits) {
  Rational rounded = round_to(value, fraction_digits) * pow10(fraction_digits);
  bool negative = rounded < 0;
  cpp_int units = boost::multiprecision::numerator(negative ? -rounded : rounded);
  std::string digits = units.str();
  if (fraction_digits > 0) {
    if (digits.size() <= static_cast<std::size_t>(fraction_digits)) {
      digits.insert(0, fraction_digits + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - fraction_digits, ".");
  }
  return negative && units != 0 ? "-" + digits : digits;
}

}  // namespace sheriff
