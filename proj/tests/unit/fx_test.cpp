#include "sheriff/fx/gate.hpp"
#include "sheriff/fx/ingest.hpp"
#include "sheriff/fx/interval.hpp"
#include "sheriff/fx/rate_table.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <random>
#include <sstream>

using namespace sheriff;
using namespace sheriff::fx;

namespace {

const Date kDay = parse_date("2013-02-01");

RateTable eur_usd_table(const char* low = "1.30", const char* high = "1.32") {
  std::istringstream in(std::string("2013-02-01,EUR,USD,") + low + "," + high + "\n");
  return RateTable::load(in, "USD");
}

PriceObservation obs(const char* amount, const char* currency, const char* vantage) {
  PriceObservation o;
  o.check_id = "c";
  o.vantage = vantage;
  o.money = Money::of(amount, currency);
  o.fetched_at = parse_timestamp("2013-02-01T12:00:00Z");
  return o;
}

// Grid oracle: a difference is explainable by currency when some EUR->USD
// rate on a 0.001 grid inside the window brings the converted prices within
// the equality tolerance of each other.
bool explainable_on_grid(double eur_amount, double usd_amount, double low, double high) {
  for (double r = low; r <= high + 1e-12; r += 0.001) {
    if (std::abs(eur_amount * r - usd_amount) <= 0.005 + 1e-12) return true;
  }
  // Between grid points the converted price moves by at most amount*0.001.
  return eur_amount * low <= usd_amount + 0.005 && usd_amount - 0.005 <= eur_amount * high;
}

}  // namespace

TEST(RateTable, DirectLookup) {
  auto table = eur_usd_table();
  auto w = table.to_reference("EUR", kDay);
  EXPECT_EQ(w.low, Rational(130, 100));
  EXPECT_EQ(w.high, Rational(132, 100));
}

TEST(RateTable, InverseSynthesis) {
  auto table = eur_usd_table();
  auto w = table.lookup("USD", "EUR", kDay);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->low, 1 / Rational(132, 100));
  EXPECT_EQ(w->high, 1 / Rational(130, 100));
}

TEST(RateTable, EmptyStreamHasNoReference) {
  std::istringstream in("");
  EXPECT_THROW(RateTable::load(in, "USD"), MissingReferenceCurrency);
  std::istringstream other("2013-02-01,EUR,GBP,0.85,0.86\n");
  EXPECT_THROW(RateTable::load(other, "USD"), MissingReferenceCurrency);
}

TEST(RateTable, DuplicatesAndMalformedRecords) {
  std::istringstream dup("2013-02-01,EUR,USD,1.30,1.32\n2013-02-01,EUR,USD,1.31,1.33\n");
  EXPECT_THROW(RateTable::load(dup, "USD"), DuplicateRecord);
  EXPECT_THROW(parse_rate_record("2013-02-01,EUR,USD,1.32,1.30"), MalformedRecord);
  EXPECT_THROW(parse_rate_record("2013-02-01,EUR,USD,0,1.30"), MalformedRecord);
  EXPECT_THROW(parse_rate_record("2013-02-01,EUR,USD,1.30"), MalformedRecord);
  EXPECT_THROW(parse_rate_record("yesterday,EUR,USD,1.30,1.31"), MalformedRecord);
}

TEST(RateTable, CrossRatesComposeThroughReference) {
  std::istringstream in(
      "2013-02-01,EUR,USD,1.30,1.32\n"
      "2013-02-01,USD,GBP,0.62,0.64\n");
  auto table = RateTable::load(in, "USD");
  auto w = table.lookup("EUR", "GBP", kDay);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->low, Rational(130, 100) * Rational(62, 100));
  EXPECT_EQ(w->high, Rational(132, 100) * Rational(64, 100));
  EXPECT_FALSE(table.lookup("EUR", "JPY", kDay));
  EXPECT_FALSE(table.lookup("EUR", "USD", parse_date("2013-02-02")));
}

TEST(RateTable, RecordFormatRoundTrip) {
  auto w = parse_rate_record("2013-02-01,EUR,USD,1.30,1.32");
  EXPECT_EQ(format_rate_record(w), "2013-02-01,EUR,USD,1.3,1.32");
  EXPECT_EQ(parse_rate_record(format_rate_record(w)).high, w.high);
}

TEST(ReferenceInterval, HandMultiplicationMatchesBruteForce) {
  auto table = eur_usd_table();
  auto iv = to_reference_interval(Money::of("100", "EUR"), table, kDay);
  EXPECT_EQ(iv.lo, Rational(130));
  EXPECT_EQ(iv.hi, Rational(132));
  // Brute force: min/max over every record that converts EUR on that day.
  Rational lo = -1, hi = -1;
  for (const auto& rec : table.records()) {
    if (rec.base != "EUR" || rec.date != kDay) continue;
    for (const Rational& r : {rec.low, rec.high}) {
      Rational converted = Rational(100) * r;
      if (lo < 0 || converted < lo) lo = converted;
      if (hi < 0 || converted > hi) hi = converted;
    }
  }
  EXPECT_EQ(iv.lo, lo);
  EXPECT_EQ(iv.hi, hi);
}

TEST(ReferenceInterval, ReferenceCurrencyIsDegenerate) {
  auto iv = to_reference_interval(Money::of("50", "USD"), eur_usd_table(), kDay);
  EXPECT_EQ(iv.lo, Rational(50));
  EXPECT_EQ(iv.hi, Rational(50));
}

TEST(ReferenceInterval, MissingRate) {
  EXPECT_THROW(to_reference_interval(Money::of("10", "GBP"), eur_usd_table(), kDay), MissingRate);
}

TEST(ReferenceInterval, IsLinear) {
  auto table = eur_usd_table("1.2913", "1.3377");
  auto one = to_reference_interval(Money::of("17.33", "EUR"), table, kDay);
  auto seven = to_reference_interval(Money::of("121.31", "EUR"), table, kDay);
  EXPECT_EQ(seven.lo, one.lo * 7);
  EXPECT_EQ(seven.hi, one.hi * 7);
}

TEST(CurrencyGate, OverlappingIntervalsDoNotPass) {
  std::vector<PriceObservation> set{obs("100", "EUR", "fi"), obs("131", "USD", "us")};
  auto v = currency_gate(set, eur_usd_table());
  EXPECT_FALSE(v.passed);
  EXPECT_TRUE(explainable_on_grid(100, 131, 1.30, 1.32));
  EXPECT_EQ(v.passed, v.observed_gap > v.max_currency_gap);
}

TEST(CurrencyGate, IdenticalPrices) {
  std::vector<PriceObservation> set{obs("100", "USD", "a"), obs("100", "USD", "b")};
  auto v = currency_gate(set, eur_usd_table());
  EXPECT_FALSE(v.passed);
  EXPECT_EQ(v.observed_gap, Rational(1));
}

TEST(CurrencyGate, DisjointIntervalsPass) {
  std::vector<PriceObservation> set{obs("100", "EUR", "fi"), obs("150", "USD", "us")};
  auto v = currency_gate(set, eur_usd_table());
  EXPECT_TRUE(v.passed);
  EXPECT_FALSE(explainable_on_grid(100, 150, 1.30, 1.32));
  EXPECT_GT(v.observed_gap, v.max_currency_gap);
}

TEST(CurrencyGate, GridOracleAgreesOnSweep) {
  auto table = eur_usd_table();
  for (int usd_cents = 12500; usd_cents <= 13800; usd_cents += 7) {
    std::string usd = std::to_string(usd_cents / 100) + "." + (usd_cents % 100 < 10 ? "0" : "") +
                      std::to_string(usd_cents % 100);
    std::vector<PriceObservation> set{obs("100", "EUR", "fi"), obs(usd.c_str(), "USD", "us")};
    auto v = currency_gate(set, table);
    EXPECT_EQ(v.passed, !explainable_on_grid(100, usd_cents / 100.0, 1.30, 1.32)) << usd;
  }
}

TEST(CurrencyGate, NeedsTwoObservations) {
  std::vector<PriceObservation> one{obs("1", "USD", "a")};
  EXPECT_THROW(currency_gate(one, eur_usd_table()), InsufficientObservations);
}

TEST(CurrencyGate, MissingRateForAnyObservation) {
  std::vector<PriceObservation> set{obs("1", "USD", "a"), obs("1", "GBP", "b")};
  EXPECT_THROW(currency_gate(set, eur_usd_table()), MissingRate);
}

TEST(CurrencyGate, SoundnessProperty) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 3000; ++i) {
    Rational low = Rational(1000 + static_cast<int>(rng() % 1000), 1000);
    Rational high = low + Rational(static_cast<int>(rng() % 50), 1000);
    RateTable table = RateTable::from_records({RateWindow{kDay, "EUR", "USD", low, high}}, "USD");
    Rational r = low + (high - low) * Rational(static_cast<int>(rng() % 1001), 1000);
    Money eur = Money::of(Decimal::from_units(static_cast<std::int64_t>(1 + rng() % 10'000'000)), "EUR");
    Rational usd_exact = eur.amount.to_rational() * r;
    // The reference price is exact (not a Decimal) to test the rule itself.
    std::vector<RefInterval> intervals{to_reference_interval(eur, table, kDay), {usd_exact, usd_exact}};
    auto v = currency_gate(intervals);
    ASSERT_FALSE(v.passed) << eur.amount.to_string() << " at " << to_double(r);
    ASSERT_EQ(v.passed, v.observed_gap > v.max_currency_gap);
  }
}

TEST(CurrencyGate, WideningNeverFlipsFalseToTrue) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    Rational low = Rational(1200 + static_cast<int>(rng() % 200), 1000);
    Rational high = low + Rational(static_cast<int>(rng() % 40), 1000);
    Money eur = Money::of(Decimal::from_units(static_cast<std::int64_t>(10000 + rng() % 10'000'000)), "EUR");
    Money usd = Money::of(Decimal::from_units(static_cast<std::int64_t>(10000 + rng() % 13'000'000)), "USD");
    auto verdict = [&](Rational lo, Rational hi) {
      auto table = RateTable::from_records({RateWindow{kDay, "EUR", "USD", lo, hi}}, "USD");
      std::vector<RefInterval> iv{to_reference_interval(eur, table, kDay),
                                  to_reference_interval(usd, table, kDay)};
      return currency_gate(iv).passed;
    };
    bool narrow = verdict(low, high);
    bool wide = verdict(low - Rational(static_cast<int>(rng() % 50), 1000), high + Rational(static_cast<int>(rng() % 50), 1000));
    ASSERT_FALSE(!narrow && wide);
  }
}

TEST(CurrencyGate, SingleCurrencyReducesToRatio) {
  std::mt19937_64 rng(11);
  auto table = eur_usd_table();
  for (int i = 0; i < 2000; ++i) {
    std::vector<RefInterval> iv;
    std::int64_t lo_cents = -1, hi_cents = -1;
    int n = 2 + static_cast<int>(rng() % 5);
    for (int k = 0; k < n; ++k) {
      std::int64_t cents = 100 + static_cast<std::int64_t>(rng() % 20);
      lo_cents = lo_cents < 0 ? cents : std::min(lo_cents, cents);
      hi_cents = std::max(hi_cents, cents);
      iv.push_back(to_reference_interval(Money::of(Decimal::from_units(cents * 100), "USD"), table, kDay));
    }
    ASSERT_EQ(currency_gate(iv).passed, hi_cents > lo_cents);
  }
}

TEST(QuoteClient, ReducesIntradayQuotesToWindow) {
  httplib::Server server;
  std::string seen_query;
  server.Get("/quotes", [&](const httplib::Request& req, httplib::Response& res) {
    seen_query = req.get_param_value("base") + "/" + req.get_param_value("quote") + "@" + req.get_param_value("date");
    if (req.get_param_value("base") == "XXX") {
      res.status = 404;
      return;
    }
    res.set_content(R"({"quotes": ["1.3012", "1.3188", 1.305, "1.3101"]})", "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  QuoteClient client("http://127.0.0.1:" + std::to_string(port));
  auto w = client.daily_window("EUR", "USD", kDay);
  EXPECT_EQ(seen_query, "EUR/USD@2013-02-01");
  EXPECT_EQ(w.low, parse_rational("1.3012"));
  EXPECT_EQ(w.high, parse_rational("1.3188"));
  EXPECT_THROW(client.daily_window("XXX", "USD", kDay), QuoteServiceError);

  std::vector<std::vector<RateWindow>> published;
  RateRefresher refresher(client, {{"EUR", "USD"}}, "USD", Millis(50),
                          [&](const auto& fresh) { published.push_back(fresh); });
  ASSERT_TRUE(refresher.refresh_once(kDay));
  auto table = refresher.current();
  ASSERT_TRUE(table);
  EXPECT_EQ(table->to_reference("EUR", kDay).high, parse_rational("1.3188"));
  EXPECT_EQ(published.size(), 1u);

  server.stop();
  t.join();
  EXPECT_FALSE(refresher.refresh_once(kDay));
  EXPECT_EQ(refresher.current(), table);
}
