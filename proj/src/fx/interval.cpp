#include "sheriff/fx/interval.hpp"

namespace sheriff::fx {

RefInterval to_reference_interval(const Money& m, const RateTable& table, Date date) {
  Rational amount = m.amount.to_rational();
  if (m.currency == table.reference()) return {amount, amount};
  RateWindow w = table.to_reference(m.currency, date);
  return {amount * w.low, amount * w.high};
}

}  // namespace sheriff::fx
