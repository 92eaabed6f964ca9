#pragma once

#include "sheriff/core/decimal.hpp"
#include "sheriff/core/errors.hpp"

#include <string>

namespace sheriff {

class InvalidMoney : public Error {
 public:
  using Error::Error;
};

// A positive exact amount in an ISO-4217 currency.
struct Money {
  Decimal amount;
  std::string currency;

  // Validates amount > 0 and a three-letter upper-case code.
  static Money of(Decimal amount, std::string currency);
  static Money of(std::string_view amount, std::string currency);

  friend bool operator==(const Money&, const Money&) = default;
};

bool is_iso_code_shape(std::string_view code);

}  // namespace sheriff
