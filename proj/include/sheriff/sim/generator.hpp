#pragma once

#include "sheriff/sim/policy.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sheriff::sim {

// Knobs for synthesizing a fleet of retailers with known discrimination.
struct FleetSpec {
  int retailers = 21;
  std::uint64_t seed = 1;
  std::string domain_pattern = "simshop-%02d.test";

  std::vector<std::string> regions = {"US-NY", "US-CHI", "BR", "FI", "DE", "UK"};
  // Region pinned to multiplier 1.0 in every retailer; empty to draw all.
  std::string baseline_region = "US-CHI";
  Rational multiplier_min{110, 100};
  Rational multiplier_max{130, 100};
  // Multipliers are drawn on this grid to keep prices exact.
  Rational multiplier_step{1, 1000};
  // Overrides the draw: region -> multiplier for every retailer.
  std::map<std::string, Rational> fixed_multipliers;
  // Retailer index -> region -> multiplier, applied last.
  std::map<int, std::map<std::string, Rational>> retailer_overrides;
  Decimal surcharge;

  // region -> display currency; unspecified regions show fx_base.
  std::map<std::string, std::string> display_currency;
  // currency -> units per USD.
  std::map<std::string, Rational> display_rates = {
      {"EUR", Rational(77, 100)}, {"GBP", Rational(63, 100)}, {"BRL", Rational(201, 100)},
      {"CAD", Rational(101, 100)}, {"CHF", Rational(93, 100)}, {"SEK", Rational(642, 100)}};

  int catalog_min = 120;
  int catalog_max = 250;
  Decimal price_min = Decimal::from_integer(10);
  Decimal price_max = Decimal::from_integer(2000);

  double ab_probability = 0.0;
  Rational ab_epsilon{0};

  std::vector<std::string> third_parties = {"www.google-analytics.com", "stats.g.doubleclick.net"};
};

std::vector<PricingPolicy> generate_fleet(const FleetSpec& spec);

}  // namespace sheriff::sim
