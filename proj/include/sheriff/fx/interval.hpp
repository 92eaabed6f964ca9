#pragma once

#include "sheriff/core/money.hpp"
#include "sheriff/core/rational.hpp"
#include "sheriff/fx/rate_table.hpp"

namespace sheriff::fx {

// A price expressed in reference-currency units under every rate inside
// the day's window.
struct RefInterval {
  Rational lo;
  Rational hi;

  Rational midpoint() const { return (lo + hi) / 2; }
  friend bool operator==(const RefInterval&, const RefInterval&) = default;
};

RefInterval to_reference_interval(const Money& m, const RateTable& table, Date date);

}  // namespace sheriff::fx
