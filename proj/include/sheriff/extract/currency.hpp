#pragma once

#include "sheriff/core/errors.hpp"
#include "sheriff/extract/selector.hpp"

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sheriff::extract {

class UnknownCurrency : public Error {
 public:
  using Error::Error;
};

class InvalidCurrencyTable : public Error {
 public:
  using Error::Error;
};

struct CurrencyRecord {
  std::string symbol;
  std::string code;
  LocaleHint locale = LocaleHint::Anglophone;
  // Host suffixes ("ca", "com.au") that resolve an ambiguous symbol.
  std::vector<std::string> tld_hints;
};

// Symbol -> ISO code table. One record per line in the file form:
//
//   symbol,ISO code,default locale[,tld hint ...]
//
// '#' starts a comment. A symbol listed by several records is ambiguous;
// its first record is the fallback reading.
class CurrencyTable {
 public:
  static CurrencyTable builtin();
  static CurrencyTable load(std::istream& in);
  static CurrencyTable load_file(const std::string& path);

  explicit CurrencyTable(std::vector<CurrencyRecord> records);

  bool is_known(std::string_view code) const;
  std::optional<LocaleHint> default_locale(std::string_view code) const;
  const std::vector<CurrencyRecord>& records() const { return records_; }
  std::vector<std::string> codes() const;

 private:
  std::vector<CurrencyRecord> records_;
};

// Text the price was found in, used to disambiguate shared symbols.
struct PageContext {
  std::string_view text;  // page text, ideally the rendered body text
  std::string_view host;
};

struct CurrencyMatch {
  std::string code;
  // Set when a shared symbol fell back to its default reading.
  bool ambiguous = false;
};

// Resolution order: an ISO code inside the price text; a currency symbol
// (longest match); for shared symbols an ISO code in the page nearest the
// price, then the host's TLD, then the symbol's default with `ambiguous`
// set. With no marker at all, the ISO code nearest the price in the page.
CurrencyMatch detect_currency(const RawPriceText& raw, const CurrencyTable& table,
                              const PageContext* context = nullptr);

}  // namespace sheriff::extract
