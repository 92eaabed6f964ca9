#include "sheriff/extract/price_parser.hpp"

#include "sheriff/extract/html.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace sheriff::extract {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct NumericRun {
  std::size_t begin;
  std::size_t end;
};

std::size_t digits_from(std::string_view s, std::size_t pos) {
  std::size_t n = 0;
  while (pos + n < s.size() && is_digit(s[pos + n])) ++n;
  return n;
}

// Maximal spans of digits joined by single separators. Spaces and
// apostrophes only join when exactly three digits follow, so "2 19,99"
// splits into two runs.
std::vector<NumericRun> numeric_runs(std::string_view s) {
  std::vector<NumericRun> runs;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_digit(s[i])) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    i += digits_from(s, i);
    while (i + 1 < s.size()) {
      char sep = s[i];
      std::size_t following = digits_from(s, i + 1);
      if (following == 0) break;
      if (sep == '.' || sep == ',') {
        i += 1 + following;
      } else if ((sep == ' ' || sep == '\'') && following == 3) {
        i += 4;
      } else {
        break;
      }
    }
    runs.push_back({begin, i});
  }
  return runs;
}

std::size_t marker_position(std::string_view text, const CurrencyTable& table) {
  std::size_t best = std::string_view::npos;
  for (const auto& r : table.records()) {
    auto p = text.find(r.symbol);
    if (p != std::string_view::npos && p < best) best = p;
  }
  for (const auto& code : table.codes()) {
    auto p = text.find(code);
    if (p != std::string_view::npos && p < best) best = p;
  }
  return best;
}

bool is_grouping_for(char c, std::optional<LocaleHint> hint) {
  if (!hint) return c == ' ' || c == '\'';
  switch (*hint) {
    case LocaleHint::ContinentalEuropean: return c == '.' || c == ' ' || c == '\'';
    case LocaleHint::Anglophone: return c == ',' || c == ' ';
    case LocaleHint::Swiss: return c == '\'' || c == ' ' || c == ',';
  }
  return false;
}

char decimal_for(LocaleHint hint) { return hint == LocaleHint::ContinentalEuropean ? ',' : '.'; }

}  // namespace

Decimal parse_amount(std::string_view numeric, std::optional<LocaleHint> hint) {
  auto fail = [&](const std::string& why) -> UnparseablePrice {
    return UnparseablePrice("cannot read '" + std::string(numeric) + "': " + why);
  };
  if (numeric.empty() || !is_digit(numeric.front()) || !is_digit(numeric.back())) {
    throw fail("must start and end with a digit");
  }
  std::vector<std::string> groups(1);
  std::vector<char> seps;
  for (char c : numeric) {
    if (is_digit(c)) {
      groups.back() += c;
    } else if (c == '.' || c == ',' || c == ' ' || c == '\'') {
      if (groups.back().empty()) throw fail("adjacent separators");
      seps.push_back(c);
      groups.emplace_back();
    } else {
      throw fail("unexpected character");
    }
  }

  // Index into `seps` of the decimal separator, if any.
  std::optional<std::size_t> decimal;
  if (hint) {
    char dec = decimal_for(*hint);
    for (std::size_t k = 0; k < seps.size(); ++k) {
      if (seps[k] == dec) {
        if (decimal) throw fail("more than one decimal separator");
        decimal = k;
      } else if (!is_grouping_for(seps[k], hint)) {
        throw fail(std::string("separator '") + seps[k] + "' not valid for locale " + to_string(*hint));
      }
    }
    if (decimal && *decimal + 1 != seps.size()) throw fail("decimal separator before grouping");
  } else {
    auto dots = std::count(seps.begin(), seps.end(), '.');
    auto commas = std::count(seps.begin(), seps.end(), ',');
    if (dots > 0 && commas > 0) {
      char last = seps.back();
      if (last != '.' && last != ',') throw fail("grouping after decimal separator");
      if (std::count(seps.begin(), seps.end(), last) != 1) throw fail("decimal separator repeated");
      decimal = seps.size() - 1;
    } else if (dots + commas == 1) {
      std::size_t k = static_cast<std::size_t>(
          std::find_if(seps.begin(), seps.end(), [](char c) { return c == '.' || c == ','; }) - seps.begin());
      bool other_grouping_before = k > 0;
      if (k + 1 != seps.size()) {
        // A lone '.'/',' followed by more grouping reads as grouping itself.
      } else if (other_grouping_before) {
        decimal = k;
      } else {
        const std::string& after = groups[k + 1];
        std::string joined = groups[k] + after;
        bool grouping = after.size() == 3 &&
                        std::stoull(joined.size() > 18 ? joined.substr(joined.size() - 18) : joined) > 999;
        if (!grouping) decimal = k;
      }
    }
  }

  std::size_t integer_groups = decimal ? *decimal + 1 : groups.size();
  if (integer_groups > 1) {
    if (groups[0].size() > 3) throw fail("leading group longer than three digits");
    for (std::size_t g = 1; g < integer_groups; ++g) {
      if (groups[g].size() != 3) throw fail("digit group not three digits long");
    }
    if (!decimal) {
      // All separators group; under the no-hint rules '.' and ',' may not mix.
      char first_sep = 0;
      for (char c : seps) {
        if (c == '.' || c == ',') {
          if (first_sep && c != first_sep) throw fail("mixed grouping separators");
          first_sep = c;
        }
      }
    }
  }
  std::string plain;
  for (std::size_t g = 0; g < integer_groups; ++g) plain += groups[g];
  if (decimal) {
    const std::string& fraction = groups.back();
    if (fraction.size() > static_cast<std::size_t>(Decimal::kMaxFractionDigits)) {
      throw fail("more than four fraction digits");
    }
    plain += "." + fraction;
  }
  auto value = Decimal::try_parse(plain);
  if (!value) throw fail("amount out of range");
  return *value;
}

Money parse_price(const RawPriceText& raw_in, const CurrencyTable& table, const PageContext* context) {
  RawPriceText raw{normalize_whitespace(raw_in.text), raw_in.locale_hint};
  if (raw.text.empty()) throw UnparseablePrice("empty price text");
  auto runs = numeric_runs(raw.text);
  if (runs.empty()) throw UnparseablePrice("no digits in '" + raw.text + "'");

  const NumericRun* chosen = &runs.front();
  if (runs.size() > 1) {
    std::size_t marker = marker_position(raw.text, table);
    if (marker == std::string_view::npos) {
      throw UnparseablePrice("several numbers and no currency marker in '" + raw.text + "'");
    }
    auto distance = [&](const NumericRun& r) {
      if (marker < r.begin) return r.begin - marker;
      if (marker >= r.end) return marker - r.end;
      return std::size_t{0};
    };
    chosen = &*std::min_element(runs.begin(), runs.end(),
                                [&](const auto& a, const auto& b) { return distance(a) < distance(b); });
  }
  Decimal amount = parse_amount(std::string_view(raw.text).substr(chosen->begin, chosen->end - chosen->begin),
                                raw.locale_hint);
  if (!amount.is_positive()) throw UnparseablePrice("price must be positive in '" + raw.text + "'");
  CurrencyMatch currency = detect_currency(raw, table, context);
  return Money::of(amount, currency.code);
}

std::string canonical_format(const Money& m) { return m.currency + " " + m.amount.to_string(2); }

Money extract_price(const Document& page, const PriceSelector& sel, const CurrencyTable& table,
                    std::string_view host) {
  RawPriceText raw = apply_selector(page, sel);
  const Node* body = page.body();
  std::string text = body ? body->text_content() : std::string();
  PageContext context{text, host};
  return parse_price(raw, table, &context);
}

Money extract_price(std::string_view page, const PriceSelector& sel, const CurrencyTable& table,
                    std::string_view host) {
  return extract_price(Document::parse(page), sel, table, host);
}

}  // namespace sheriff::extract
