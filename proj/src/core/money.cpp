#include "sheriff/core/money.hpp"

namespace sheriff {

bool is_iso_code_shape(std::string_view code) {
  if (code.size() != 3) return false;
  for (char c : code) {
    if (c < 'A' || c > 'Z') return false;
  }
  return true;
}

Money Money::of(Decimal amount, std::string currency) {
  if (!amount.is_positive()) {
    throw InvalidMoney("amount must be positive, got " + amount.to_string());
  }
  if (!is_iso_code_shape(currency)) {
    throw InvalidMoney("not an ISO-4217 code: '" + currency + "'");
  }
  return Money{amount, std::move(currency)};
}

Money Money::of(std::string_view amount, std::string currency) {
  return of(Decimal::parse(amount), std::move(currency));
}

}  // namespace sheriff
