#include "sheriff/analytics/stats.hpp"

#include <algorithm>

namespace sheriff::analytics {

namespace {

// Value of rank `lo` plus the fractional step towards rank lo + 1; the
// vector is partitioned in place.
Rational interpolate(std::vector<Rational>& v, const Rational& p) {
  Rational h = Rational(static_cast<long long>(v.size() - 1)) * p;
  boost::multiprecision::cpp_int whole = numerator(h) / denominator(h);
  auto lo = static_cast<std::size_t>(whole);
  Rational frac = h - Rational(whole);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  Rational x_lo = v[lo];
  if (frac == 0) return x_lo;
  Rational x_hi = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return x_lo + frac * (x_hi - x_lo);
}

}  // namespace

Rational quantile(std::vector<Rational> values, const Rational& p) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  if (p < 0 || p > 1) throw InvalidArgument("quantile probability outside [0, 1]");
  return interpolate(values, p);
}

RatioStats ratio_stats(std::vector<Rational> values) {
  RatioStats s;
  if (values.empty()) return s;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.q25 = interpolate(values, Rational(1, 4));
  s.median = interpolate(values, Rational(1, 2));
  s.q75 = interpolate(values, Rational(3, 4));
  return s;
}

}  // namespace sheriff::analytics
