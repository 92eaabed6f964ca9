#include "sheriff/extract/currency.hpp"
#include "sheriff/extract/price_parser.hpp"
#include "sheriff/extract/selector.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sheriff;
using namespace sheriff::extract;

namespace {

const char* kPage = R"(<html><body>
  <div class="nav">Home</div>
  <div class="product"><span>€19.99</span><span>In stock</span></div>
  <div class="reco"><span>Our price:</span><span>€4.50</span></div>
</body></html>)";

// Test-only locale formatter, written independently of the parser: renders
// cents as a display string with the locale's grouping and decimal marks.
std::string format_locale(std::int64_t cents, char group, char decimal, bool grouped) {
  std::string whole = std::to_string(cents / 100);
  std::string out;
  int count = 0;
  for (auto it = whole.rbegin(); it != whole.rend(); ++it) {
    if (grouped && count > 0 && count % 3 == 0) out.insert(out.begin(), group);
    out.insert(out.begin(), *it);
    ++count;
  }
  char frac[4];
  std::snprintf(frac, sizeof frac, "%02lld", static_cast<long long>(cents % 100));
  return out + decimal + frac;
}

// Frozen pairs produced by format_locale before the parser existed.
struct FormattedPair {
  const char* text;
  std::int64_t cents;
  std::optional<LocaleHint> hint;
};

const FormattedPair kLocaleTable[] = {
    {"1.234,56", 123456, LocaleHint::ContinentalEuropean},
    {"19,99", 1999, LocaleHint::ContinentalEuropean},
    {"1.000.000,00", 100000000, LocaleHint::ContinentalEuropean},
    {"999,00", 99900, LocaleHint::ContinentalEuropean},
    {"1,234.56", 123456, LocaleHint::Anglophone},
    {"19.99", 1999, LocaleHint::Anglophone},
    {"12,345,678.90", 1234567890, LocaleHint::Anglophone},
    {"1'234.50", 123450, LocaleHint::Swiss},
    {"0.99", 99, LocaleHint::Anglophone},
    {"0,05", 5, LocaleHint::ContinentalEuropean},
};

}  // namespace

TEST(ApplySelector, DomPathLookup) {
  auto raw = apply_selector(kPage, PriceSelector::dom_path("body/div[2]/span[1]"));
  EXPECT_EQ(raw.text, "€19.99");
  EXPECT_EQ(apply_selector(kPage, PriceSelector::dom_path("/html/body/div[2]/span")).text, "€19.99");
}

TEST(ApplySelector, AbsentNodeIsSelectorMiss) {
  EXPECT_THROW(apply_selector(kPage, PriceSelector::dom_path("body/div[9]/span[1]")), SelectorMiss);
}

TEST(ApplySelector, TextAnchorReturnsRegionAtOffset) {
  EXPECT_EQ(apply_selector(kPage, PriceSelector::text_anchor("Our price:", 1)).text, "€4.50");
  EXPECT_THROW(apply_selector(kPage, PriceSelector::text_anchor("Sold out", 1)), SelectorMiss);
  EXPECT_THROW(apply_selector(kPage, PriceSelector::text_anchor("Our price:", 9)), SelectorMiss);
}

TEST(ApplySelector, TextAnchorMatchingTwiceIsAmbiguous) {
  const char* page = "<p>Price</p><p>1,00 €</p><p>Price</p><p>2,00 €</p>";
  EXPECT_THROW(apply_selector(page, PriceSelector::text_anchor("Price", 1)), SelectorAmbiguous);
}

TEST(ApplySelector, IsDeterministic) {
  auto sel = PriceSelector::dom_path("body/div[3]/span[2]");
  EXPECT_EQ(apply_selector(kPage, sel).text, apply_selector(kPage, sel).text);
}

TEST(PriceSelector, RejectsMalformedExpressions) {
  EXPECT_THROW(PriceSelector::dom_path(""), InvalidSelector);
  EXPECT_THROW(PriceSelector::dom_path("body//span"), InvalidSelector);
  EXPECT_THROW(PriceSelector::dom_path("body/div[0]"), InvalidSelector);
  EXPECT_THROW(PriceSelector::dom_path("body/div[x]"), InvalidSelector);
  EXPECT_THROW(PriceSelector::dom_path("body/di v"), InvalidSelector);
  EXPECT_THROW(PriceSelector::text_anchor("", 1), InvalidSelector);
  EXPECT_NO_THROW(PriceSelector::dom_path("body/div[2]/span[1]"));
}

TEST(PriceSelector, JsonRoundTrip) {
  auto sel = PriceSelector::text_anchor("Our price:", 1, parse_timestamp("2013-02-01T00:00:00Z"));
  auto back = selector_from_json(to_json(sel));
  EXPECT_EQ(back, sel);
  EXPECT_EQ(back.recorded_at, sel.recorded_at);
}

TEST(ParsePrice, ContinentalHint) {
  auto table = CurrencyTable::builtin();
  Money m = parse_price({"€1.234,56", LocaleHint::ContinentalEuropean}, table);
  EXPECT_EQ(m, Money::of("1234.56", "EUR"));
}

TEST(ParsePrice, AnglophoneDollar) {
  EXPECT_EQ(parse_price({"$1,234.56", {}}, CurrencyTable::builtin()), Money::of("1234.56", "USD"));
}

TEST(ParsePrice, BareNumberTakesPageCurrency) {
  std::string page_text = "Alle Preise in EUR inkl. MwSt. 19,99";
  PageContext ctx{page_text, "shop.de"};
  EXPECT_EQ(parse_price({"19,99", {}}, CurrencyTable::builtin(), &ctx), Money::of("19.99", "EUR"));
}

TEST(ParsePrice, FrozenLocaleTableMatchesIndependentFormatter) {
  // The frozen strings must still be what the oracle formatter emits.
  EXPECT_EQ(format_locale(123456, '.', ',', true), "1.234,56");
  EXPECT_EQ(format_locale(1234567890, ',', '.', true), "12,345,678.90");
  EXPECT_EQ(format_locale(123450, '\'', '.', true), "1'234.50");
  for (const auto& pair : kLocaleTable) {
    Decimal expected = Decimal::from_units(pair.cents * 100);
    EXPECT_EQ(parse_amount(pair.text, pair.hint), expected) << pair.text;
    EXPECT_EQ(parse_amount(pair.text), expected) << pair.text << " (no hint)";
  }
}

TEST(ParsePrice, OracleSweepAcrossLocales) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::int64_t> cents(1, 99'999'999);
  struct Style {
    char group, decimal;
    LocaleHint hint;
  };
  const Style styles[] = {{'.', ',', LocaleHint::ContinentalEuropean},
                          {',', '.', LocaleHint::Anglophone},
                          {'\'', '.', LocaleHint::Swiss}};
  for (int i = 0; i < 3000; ++i) {
    std::int64_t c = cents(rng);
    for (const auto& s : styles) {
      for (bool grouped : {true, false}) {
        std::string text = format_locale(c, s.group, s.decimal, grouped);
        Decimal expected = Decimal::from_units(c * 100);
        ASSERT_EQ(parse_amount(text, s.hint), expected) << text;
        ASSERT_EQ(parse_amount(text), expected) << text;
      }
    }
  }
}

TEST(ParsePrice, DisambiguationRulesWithoutHint) {
  EXPECT_EQ(parse_amount("1,234"), Decimal::parse("1234"));
  EXPECT_EQ(parse_amount("1.234"), Decimal::parse("1234"));
  EXPECT_EQ(parse_amount("0,500"), Decimal::parse("0.5"));
  EXPECT_EQ(parse_amount("19,99"), Decimal::parse("19.99"));
  EXPECT_EQ(parse_amount("19,9"), Decimal::parse("19.9"));
  EXPECT_EQ(parse_amount("12,3456"), Decimal::parse("12.3456"));
  EXPECT_EQ(parse_amount("1.234.567"), Decimal::parse("1234567"));
  EXPECT_EQ(parse_amount("1 234,56"), Decimal::parse("1234.56"));
  EXPECT_EQ(parse_amount("1'234"), Decimal::parse("1234"));
  EXPECT_THROW(parse_amount("1,23,456.00"), UnparseablePrice);
  EXPECT_THROW(parse_amount("12,34567"), UnparseablePrice);
  EXPECT_THROW(parse_amount("1.234,5.6"), UnparseablePrice);
}

TEST(ParsePrice, HintsAreStrict) {
  EXPECT_THROW(parse_amount("19.99", LocaleHint::ContinentalEuropean), UnparseablePrice);
  EXPECT_THROW(parse_amount("1.234,56", LocaleHint::Anglophone), UnparseablePrice);
  EXPECT_EQ(parse_amount("1.234", LocaleHint::Anglophone), Decimal::parse("1.234"));
  EXPECT_EQ(parse_amount("1.234", LocaleHint::ContinentalEuropean), Decimal::parse("1234"));
}

TEST(ParsePrice, LocaleDualityProperty) {
  // A string read under both hints never yields the same amount unless it
  // carries no separator at all.
  std::mt19937_64 rng(7);
  const char alphabet[] = "0123456789.,";
  for (int i = 0; i < 20000; ++i) {
    std::string s(1, '1' + static_cast<char>(rng() % 9));
    int len = 1 + static_cast<int>(rng() % 9);
    for (int k = 0; k < len; ++k) s += alphabet[rng() % 12];
    if (s.back() == '.' || s.back() == ',') s += '5';
    std::optional<Decimal> cont, anglo;
    try { cont = parse_amount(s, LocaleHint::ContinentalEuropean); } catch (const UnparseablePrice&) {}
    try { anglo = parse_amount(s, LocaleHint::Anglophone); } catch (const UnparseablePrice&) {}
    bool has_separator = s.find_first_of(".,") != std::string::npos;
    if (cont && anglo && has_separator) {
      ASSERT_NE(*cont, *anglo) << s;
    }
  }
}

TEST(ParsePrice, ErrorPaths) {
  auto table = CurrencyTable::builtin();
  EXPECT_THROW(parse_price({"Add to cart", {}}, table), UnparseablePrice);
  EXPECT_THROW(parse_price({"€0,00", {}}, table), UnparseablePrice);
  EXPECT_THROW(parse_price({"12.00", {}}, table), UnknownCurrency);
  EXPECT_THROW(parse_price({"2 for 15 and 20", {}}, table), UnparseablePrice);
}

TEST(ParsePrice, PicksNumberNextToCurrencyMarker) {
  auto table = CurrencyTable::builtin();
  EXPECT_EQ(parse_price({"Save 20% now only £15.00", {}}, table), Money::of("15", "GBP"));
  EXPECT_EQ(parse_price({"R$ 1.234,56", {}}, table), Money::of("1234.56", "BRL"));
  EXPECT_EQ(parse_price({"CHF 1'234.50", {}}, table), Money::of("1234.50", "CHF"));
  EXPECT_EQ(parse_price({"1.234,56 €", {}}, table), Money::of("1234.56", "EUR"));
}

TEST(DetectCurrency, UnambiguousSymbol) {
  EXPECT_EQ(detect_currency({"£12.00", {}}, CurrencyTable::builtin()).code, "GBP");
}

TEST(DetectCurrency, IsoCodeNearPriceResolvesDollar) {
  std::string page = "Prices shown in CAD. Widget $12.00 ships free.";
  PageContext ctx{page, "shop.test"};
  auto match = detect_currency({"$12.00", {}}, CurrencyTable::builtin(), &ctx);
  EXPECT_EQ(match.code, "CAD");
  EXPECT_FALSE(match.ambiguous);
}

TEST(DetectCurrency, TldHintResolvesDollar) {
  PageContext ctx{"", "www.shop.com.au"};
  EXPECT_EQ(detect_currency({"$12.00", {}}, CurrencyTable::builtin(), &ctx).code, "AUD");
}

TEST(DetectCurrency, DollarWithoutContextFallsBackFlagged) {
  auto match = detect_currency({"$12.00", {}}, CurrencyTable::builtin());
  EXPECT_EQ(match.code, "USD");
  EXPECT_TRUE(match.ambiguous);
}

TEST(DetectCurrency, IsoCodeInsidePriceWins) {
  EXPECT_EQ(detect_currency({"$12.00 CAD", {}}, CurrencyTable::builtin()).code, "CAD");
  EXPECT_EQ(detect_currency({"US$ 5", {}}, CurrencyTable::builtin()).code, "USD");
}

TEST(DetectCurrency, NothingToDetect) {
  EXPECT_THROW(detect_currency({"12.00", {}}, CurrencyTable::builtin()), UnknownCurrency);
}

TEST(DetectCurrency, AlphabeticSymbolsNeedWordBoundaries) {
  auto table = CurrencyTable::builtin();
  EXPECT_EQ(detect_currency({"199 kr", {}}, table).code, "SEK");
  EXPECT_THROW(detect_currency({"krone 12", {}}, table), UnknownCurrency);
}

TEST(CurrencyTable, LoadsConfigFormat) {
  std::istringstream in("# comment\n€,EUR,continental\n$,USD,anglophone,us\n$,CAD,anglophone,ca\n");
  auto table = CurrencyTable::load(in);
  EXPECT_EQ(table.records().size(), 3u);
  EXPECT_TRUE(table.is_known("CAD"));
  EXPECT_FALSE(table.is_known("GBP"));
  EXPECT_EQ(table.default_locale("EUR"), LocaleHint::ContinentalEuropean);
  std::istringstream bad("€,EUR\n");
  EXPECT_THROW(CurrencyTable::load(bad), InvalidCurrencyTable);
  std::istringstream bad_locale("€,EUR,martian\n");
  EXPECT_THROW(CurrencyTable::load(bad_locale), InvalidCurrencyTable);
}

TEST(CanonicalFormat, Examples) {
  EXPECT_EQ(canonical_format(Money::of("1234.5", "EUR")), "EUR 1234.50");
  EXPECT_EQ(canonical_format(Money::of("0.99", "USD")), "USD 0.99");
}

TEST(CanonicalFormat, RoundTripProperty) {
  auto table = CurrencyTable::builtin();
  auto codes = table.codes();
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<std::int64_t> cents(1, 999'999'999);
  for (int i = 0; i < 5000; ++i) {
    Money m = Money::of(Decimal::from_units(cents(rng) * 100), codes[rng() % codes.size()]);
    ASSERT_EQ(parse_price({canonical_format(m), {}}, table), m) << canonical_format(m);
  }
}
