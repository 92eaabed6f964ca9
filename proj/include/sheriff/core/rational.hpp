#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace sheriff {

// Exact arithmetic for exchange rates, reference intervals and ratios.
using Rational = boost::multiprecision::cpp_rational;

// Parses a plain decimal literal ("1.30", "-0.005", "42") exactly.
// Throws InvalidArgument on anything else.
Rational parse_rational(std::string_view text);

double to_double(const Rational& value);

// Fixed-point rendering with round-half-away-from-zero.
std::string format_fixed(const Rational& value, int fraction_digits);

// Rounds to the given number of fraction digits, half away from zero.
Rational round_to(const Rational& value, int fraction_digits);

Rational pow10(int exponent);

}  // namespace sheriff
