#include "sheriff/extract/currency.hpp"

#include "sheriff/core/money.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace sheriff::extract {

namespace {

// Mirrors config/currencies.csv.
constexpr std::string_view kBuiltinTable = R"(US$,USD,anglophone
C$,CAD,anglophone
CA$,CAD,anglophone
A$,AUD,anglophone
AU$,AUD,anglophone
R$,BRL,continental
$,USD,anglophone,us,com
$,CAD,anglophone,ca
$,AUD,anglophone,au,com.au
$,MXN,anglophone,mx,com.mx
€,EUR,continental
£,GBP,anglophone,uk,co.uk
¥,JPY,anglophone,jp,co.jp
CHF,CHF,swiss,ch
Fr.,CHF,swiss
kr,SEK,continental,se
kr,NOK,continental,no
kr,DKK,continental,dk
zł,PLN,continental,pl
₹,INR,anglophone,in
)";

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool is_ascii_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool word_bounded(std::string_view text, std::size_t pos, std::size_t len) {
  bool left = pos == 0 || !is_ascii_alpha(text[pos - 1]);
  bool right = pos + len >= text.size() || !is_ascii_alpha(text[pos + len]);
  return left && right;
}

struct Occurrence {
  std::size_t pos;
  std::string code;
};

// Known ISO codes written as standalone upper-case words.
std::vector<Occurrence> find_iso_codes(std::string_view text, const CurrencyTable& table) {
  std::vector<Occurrence> found;
  for (std::size_t i = 0; i + 3 <= text.size(); ++i) {
    if (!std::isupper(static_cast<unsigned char>(text[i]))) continue;
    if (!word_bounded(text, i, 3)) continue;
    std::string_view candidate = text.substr(i, 3);
    if (std::all_of(candidate.begin(), candidate.end(),
                    [](char c) { return std::isupper(static_cast<unsigned char>(c)); }) &&
        table.is_known(candidate)) {
      found.push_back({i, std::string(candidate)});
    }
  }
  return found;
}

struct SymbolHit {
  std::size_t pos;
  std::string symbol;
};

std::vector<SymbolHit> find_symbols(std::string_view text, const CurrencyTable& table) {
  std::vector<std::string> symbols;
  for (const auto& r : table.records()) {
    if (std::find(symbols.begin(), symbols.end(), r.symbol) == symbols.end()) symbols.push_back(r.symbol);
  }
  std::stable_sort(symbols.begin(), symbols.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  std::vector<bool> taken(text.size(), false);
  std::vector<SymbolHit> hits;
  for (const auto& sym : symbols) {
    bool alphabetic = std::any_of(sym.begin(), sym.end(), is_ascii_alpha);
    for (auto pos = text.find(sym); pos != std::string_view::npos; pos = text.find(sym, pos + 1)) {
      if (std::any_of(taken.begin() + pos, taken.begin() + pos + sym.size(), [](bool t) { return t; })) continue;
      if (alphabetic && !word_bounded(text, pos, sym.size())) continue;
      std::fill(taken.begin() + pos, taken.begin() + pos + sym.size(), true);
      hits.push_back({pos, sym});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.pos < b.pos; });
  return hits;
}

std::vector<const CurrencyRecord*> records_for_symbol(const CurrencyTable& table, std::string_view symbol) {
  std::vector<const CurrencyRecord*> out;
  for (const auto& r : table.records()) {
    if (r.symbol == symbol) out.push_back(&r);
  }
  return out;
}

bool host_has_suffix(std::string_view host, std::string_view suffix) {
  if (host.size() <= suffix.size()) return false;
  return host.substr(host.size() - suffix.size()) == suffix && host[host.size() - suffix.size() - 1] == '.';
}

// ISO code in the page closest to where the price text occurs; restricted
// to `allowed` when non-empty.
std::optional<std::string> nearest_page_code(const RawPriceText& raw, const CurrencyTable& table,
                                             const PageContext& context,
                                             const std::set<std::string>& allowed) {
  auto codes = find_iso_codes(context.text, table);
  std::size_t anchor = context.text.find(raw.text);
  if (anchor == std::string_view::npos) anchor = 0;
  std::optional<std::string> best;
  std::size_t best_distance = std::string_view::npos;
  for (const auto& occ : codes) {
    if (!allowed.empty() && !allowed.count(occ.code)) continue;
    std::size_t distance = occ.pos > anchor ? occ.pos - anchor : anchor - occ.pos;
    if (distance < best_distance) {
      best_distance = distance;
      best = occ.code;
    }
  }
  return best;
}

}  // namespace

CurrencyTable::CurrencyTable(std::vector<CurrencyRecord> records) : records_(std::move(records)) {}

CurrencyTable CurrencyTable::builtin() {
  std::istringstream in{std::string(kBuiltinTable)};
  return load(in);
}

CurrencyTable CurrencyTable::load(std::istream& in) {
  std::vector<CurrencyRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(stripped);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() < 3 || fields[0].empty() || !is_iso_code_shape(fields[1])) {
      throw InvalidCurrencyTable("currency table line " + std::to_string(line_no) + ": expected symbol,code,locale");
    }
    CurrencyRecord record{fields[0], fields[1], LocaleHint::Anglophone, {}};
    try {
      record.locale = locale_hint_from_string(fields[2]);
    } catch (const InvalidArgument& e) {
      throw InvalidCurrencyTable("currency table line " + std::to_string(line_no) + ": " + e.what());
    }
    record.tld_hints.assign(fields.begin() + 3, fields.end());
    records.push_back(std::move(record));
  }
  if (records.empty()) throw InvalidCurrencyTable("currency table is empty");
  return CurrencyTable(std::move(records));
}

CurrencyTable CurrencyTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidCurrencyTable("cannot open currency table '" + path + "'");
  return load(in);
}

bool CurrencyTable::is_known(std::string_view code) const {
  return std::any_of(records_.begin(), records_.end(), [&](const auto& r) { return r.code == code; });
}

std::optional<LocaleHint> CurrencyTable::default_locale(std::string_view code) const {
  for (const auto& r : records_) {
    if (r.code == code) return r.locale;
  }
  return std::nullopt;
}

std::vector<std::string> CurrencyTable::codes() const {
  std::vector<std::string> out;
  for (const auto& r : records_) {
    if (std::find(out.begin(), out.end(), r.code) == out.end()) out.push_back(r.code);
  }
  return out;
}

CurrencyMatch detect_currency(const RawPriceText& raw, const CurrencyTable& table, const PageContext* context) {
  if (auto iso = find_iso_codes(raw.text, table); !iso.empty()) return {iso.front().code, false};

  auto hits = find_symbols(raw.text, table);
  if (!hits.empty()) {
    auto records = records_for_symbol(table, hits.front().symbol);
    std::set<std::string> candidates;
    for (const auto* r : records) candidates.insert(r->code);
    if (candidates.size() == 1) return {records.front()->code, false};
    if (context) {
      if (auto code = nearest_page_code(raw, table, *context, candidates)) return {*code, false};
      for (const auto* r : records) {
        for (const auto& tld : r->tld_hints) {
          if (host_has_suffix(context->host, tld)) return {r->code, false};
        }
      }
    }
    return {records.front()->code, true};
  }

  if (context) {
    if (auto code = nearest_page_code(raw, table, *context, {})) return {*code, false};
  }
  throw UnknownCurrency("no currency marker in '" + raw.text + "'");
}

}  // namespace sheriff::extract
