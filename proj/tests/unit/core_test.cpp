#include "sheriff/core/decimal.hpp"
#include "sheriff/core/money.hpp"
#include "sheriff/core/observation.hpp"
#include "sheriff/core/time.hpp"
#include "sheriff/core/uri.hpp"

#include <gtest/gtest.h>

using namespace sheriff;

TEST(Decimal, ParsesAndRenders) {
  EXPECT_EQ(Decimal::parse("1234.5").units(), 12345000);
  EXPECT_EQ(Decimal::parse("0.0001").units(), 1);
  EXPECT_EQ(Decimal::parse("-2.25").to_string(2), "-2.25");
  EXPECT_EQ(Decimal::parse("1234.5").to_string(), "1234.50");
  EXPECT_EQ(Decimal::parse("3.1416").to_string(), "3.1416");
  EXPECT_FALSE(Decimal::try_parse("1.23456").has_value());
  EXPECT_FALSE(Decimal::try_parse("1,23").has_value());
  EXPECT_FALSE(Decimal::try_parse("12.").has_value());
  EXPECT_FALSE(Decimal::try_parse(".5").has_value());
}

TEST(Decimal, RoundsHalfAwayFromZero) {
  EXPECT_EQ(Decimal::parse("0.125").to_string(2), "0.13");
  EXPECT_EQ(Decimal::parse("0.1249").to_string(2), "0.12");
  EXPECT_EQ(Decimal::parse("-0.125").to_string(2), "-0.13");
}

TEST(Decimal, RationalConversionIsExact) {
  Decimal d = Decimal::parse("100.10");
  EXPECT_EQ(Decimal::from_rational(d.to_rational()), d);
  EXPECT_THROW(Decimal::from_rational(Rational(1, 3)), InvalidArgument);
}

TEST(Rational, ParsesDecimalLiteralsExactly) {
  EXPECT_EQ(parse_rational("1.30"), Rational(13, 10));
  EXPECT_EQ(parse_rational("-0.005"), Rational(-1, 200));
  EXPECT_EQ(format_fixed(Rational(1, 3), 4), "0.3333");
  EXPECT_EQ(format_fixed(Rational(2, 3), 2), "0.67");
  EXPECT_THROW(parse_rational("1e3"), InvalidArgument);
}

TEST(Money, RejectsNonPositiveAndBadCodes) {
  EXPECT_THROW(Money::of("0", "USD"), InvalidMoney);
  EXPECT_THROW(Money::of("-1", "USD"), InvalidMoney);
  EXPECT_THROW(Money::of("1", "usd"), InvalidMoney);
  EXPECT_EQ(Money::of("19.99", "EUR").amount.units(), 199900);
}

TEST(Time, TimestampRoundTrip) {
  Timestamp t = parse_timestamp("2013-02-01T10:15:30.250Z");
  EXPECT_EQ(format_timestamp(t), "2013-02-01T10:15:30.250Z");
  EXPECT_EQ(format_date(utc_day(t)), "2013-02-01");
  EXPECT_EQ(parse_timestamp("2013-02-01"), parse_timestamp("2013-02-01T00:00:00Z"));
  EXPECT_THROW(parse_date("2013-02-30"), InvalidArgument);
}

TEST(Time, Durations) {
  EXPECT_EQ(parse_duration("24h"), Millis(86'400'000));
  EXPECT_EQ(parse_duration("2s"), Millis(2000));
  EXPECT_EQ(parse_duration("250ms"), Millis(250));
  EXPECT_EQ(parse_duration("10m"), Millis(600'000));
  EXPECT_THROW(parse_duration("fast"), InvalidArgument);
}

TEST(Uri, ParsesHttpOnly) {
  Uri u = parse_uri("http://Shop.Example.com:8080/p/1?x=2#frag");
  EXPECT_EQ(u.host, "shop.example.com");
  EXPECT_EQ(u.port, 8080);
  EXPECT_EQ(u.target, "/p/1?x=2");
  EXPECT_EQ(parse_uri("https://a.com").target, "/");
  EXPECT_THROW(parse_uri("ftp://x"), InvalidUri);
  EXPECT_THROW(parse_uri("/relative"), InvalidUri);
}

TEST(Uri, ResolvesReferences) {
  Uri base = parse_uri("http://shop.test:81/catalog/list?page=2");
  EXPECT_EQ(resolve_reference(base, "/product/7"), "http://shop.test:81/product/7");
  EXPECT_EQ(resolve_reference(base, "item/3"), "http://shop.test:81/catalog/item/3");
  EXPECT_EQ(resolve_reference(base, "//cdn.other.com/x.js"), "http://cdn.other.com/x.js");
}

TEST(Uri, RegistrableDomain) {
  EXPECT_EQ(registrable_domain("www.google-analytics.com"), "google-analytics.com");
  EXPECT_EQ(registrable_domain("shop.example.co.uk"), "example.co.uk");
  EXPECT_EQ(registrable_domain("example.com:8080"), "example.com");
  EXPECT_EQ(registrable_domain("127.0.0.1"), "127.0.0.1");
  EXPECT_EQ(registrable_domain("localhost"), "localhost");
}

TEST(Observation, JsonRoundTrip) {
  PriceObservation obs;
  obs.check_id = "chk-1";
  obs.repetition = 2;
  obs.vantage = "fi-tampere";
  obs.product_uri = "http://shop.test/p/1";
  obs.domain = "shop.test";
  obs.money = Money::of("100.10", "EUR");
  obs.fetched_at = parse_timestamp("2013-02-01T10:00:00Z");
  obs.fetch_latency = Millis(120);
  obs.snapshot_ref = "abc";
  obs.gate_flags = {GateFlag::NoiseSuspect};
  PriceObservation back = observation_from_json(nlohmann::json::parse(to_json(obs).dump()));
  EXPECT_EQ(back.key(), obs.key());
  EXPECT_EQ(back.money, obs.money);
  EXPECT_EQ(back.fetched_at, obs.fetched_at);
  EXPECT_EQ(back.gate_flags, obs.gate_flags);
  auto j = to_json(obs);
  j["v"] = 99;
  EXPECT_THROW(observation_from_json(j), InvalidArgument);
}
