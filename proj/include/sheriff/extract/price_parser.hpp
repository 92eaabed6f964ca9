#pragma once

#include "sheriff/core/errors.hpp"
#include "sheriff/core/money.hpp"
#include "sheriff/extract/currency.hpp"
#include "sheriff/extract/selector.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace sheriff::extract {

class UnparseablePrice : public Error {
 public:
  using Error::Error;
};

// Reads a number such as "1.234,56", "1,234.56", "1'234.50" or "19,99".
//
// With a locale hint the hint's separators are enforced strictly. Without
// one: when both '.' and ',' occur the rightmost is the decimal separator;
// a lone separator followed by exactly three digits is grouping when the
// grouped reading exceeds 999; otherwise a lone separator is decimal.
// Spaces and apostrophes only ever group. Groups after the first must have
// three digits; at most four fraction digits are kept exactly.
Decimal parse_amount(std::string_view numeric, std::optional<LocaleHint> hint = std::nullopt);

// Locates the numeric part of the raw text, reads it with parse_amount and
// resolves the currency with detect_currency. Throws UnparseablePrice or
// UnknownCurrency.
Money parse_price(const RawPriceText& raw, const CurrencyTable& table,
                  const PageContext* context = nullptr);

// "EUR 1234.50": code, one space, exactly two fraction digits, '.' decimal
// separator, no grouping. Amounts with three or four fraction digits are
// rounded half away from zero.
std::string canonical_format(const Money& m);

// apply_selector followed by parse_price, with the page's body text and
// host as currency context. The single extraction path for every fetch.
Money extract_price(const Document& page, const PriceSelector& sel, const CurrencyTable& table,
                    std::string_view host = {});
Money extract_price(std::string_view page, const PriceSelector& sel, const CurrencyTable& table,
                    std::string_view host = {});

}  // namespace sheriff::extract
