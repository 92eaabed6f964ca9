#include "sheriff/sim/generator.hpp"

#include "sheriff/sim/pages.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace sheriff::sim {

namespace {

constexpr const char* kNouns[] = {"Lamp",   "Kettle", "Backpack", "Headphones", "Camera", "Blender",
                                  "Jacket", "Watch",  "Router",   "Speaker",    "Drill",  "Monitor"};
constexpr const char* kAdjectives[] = {"Compact", "Classic", "Pro", "Eco", "Deluxe", "Travel", "Smart", "Mini"};

std::string domain_name(const std::string& pattern, int index) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern.c_str(), index);
  return buf;
}

Decimal draw_price(std::mt19937_64& rng, const Decimal& lo, const Decimal& hi) {
  std::uniform_real_distribution<double> u(std::log(lo.to_double()), std::log(hi.to_double()));
  auto cents = static_cast<std::int64_t>(std::llround(std::exp(u(rng)) * 100.0));
  cents = std::clamp(cents, lo.units() / 100, hi.units() / 100);
  return Decimal::from_units(cents * 100);
}

Rational draw_multiplier(std::mt19937_64& rng, const FleetSpec& spec) {
  Rational steps = (spec.multiplier_max - spec.multiplier_min) / spec.multiplier_step;
  auto count = static_cast<long long>(boost::multiprecision::numerator(steps) /
                                      boost::multiprecision::denominator(steps));
  std::uniform_int_distribution<long long> pick(0, count);
  return spec.multiplier_min + spec.multiplier_step * pick(rng);
}

}  // namespace

std::vector<PricingPolicy> generate_fleet(const FleetSpec& spec) {
  if (spec.retailers < 1) throw InvalidArgument("fleet needs at least one retailer");
  if (spec.regions.empty()) throw InvalidArgument("fleet needs at least one region");
  if (spec.catalog_min < 1 || spec.catalog_max < spec.catalog_min) throw InvalidArgument("bad catalog size range");
  if (spec.multiplier_step <= 0 || spec.multiplier_max < spec.multiplier_min) {
    throw InvalidArgument("bad multiplier range");
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<PricingPolicy> fleet;
  for (int i = 1; i <= spec.retailers; ++i) {
    PricingPolicy p;
    p.domain = domain_name(spec.domain_pattern, i);
    p.template_id = (i - 1) % kTemplateCount;
    p.fx_base = "USD";
    p.seed = spec.seed * 1000003u + static_cast<std::uint64_t>(i);
    p.third_parties = spec.third_parties;
    p.ab_noise = {spec.ab_probability, spec.ab_epsilon};

    std::uniform_int_distribution<int> size(spec.catalog_min, spec.catalog_max);
    int n = size(rng);
    for (int k = 1; k <= n; ++k) {
      char id[32];
      std::snprintf(id, sizeof id, "p%04d", k);
      std::string name = std::string(kAdjectives[rng() % std::size(kAdjectives)]) + " " +
                         kNouns[rng() % std::size(kNouns)] + " " + std::to_string(k);
      p.catalog.push_back({id, name, draw_price(rng, spec.price_min, spec.price_max), ""});
    }

    int block = 1;
    for (const auto& region : spec.regions) {
      RegionRule rule;
      if (auto f = spec.fixed_multipliers.find(region); f != spec.fixed_multipliers.end()) {
        rule.multiplier = f->second;
      } else if (region == spec.baseline_region) {
        rule.multiplier = 1;
      } else {
        rule.multiplier = draw_multiplier(rng, spec);
      }
      if (auto o = spec.retailer_overrides.find(i); o != spec.retailer_overrides.end()) {
        if (auto m = o->second.find(region); m != o->second.end()) rule.multiplier = m->second;
      }
      if (region != spec.baseline_region) rule.surcharge = spec.surcharge;
      if (auto c = spec.display_currency.find(region); c != spec.display_currency.end()) {
        rule.display_currency = c->second;
        if (c->second != p.fx_base) {
          auto rate = spec.display_rates.find(c->second);
          if (rate == spec.display_rates.end()) throw InvalidArgument("no display rate for " + c->second);
          p.display_rates[c->second] = rate->second;
        }
      }
      p.regions.emplace(region, rule);
      p.address_blocks.push_back(parse_cidr("10." + std::to_string(block++) + ".0.0/16", region));
    }
    // All configured rates, used or not.
    for (const auto& [code, rate] : spec.display_rates) p.display_rates.try_emplace(code, rate);
    p.default_region = spec.regions.front();
    p.validate();
    fleet.push_back(std::move(p));
  }
  return fleet;
}

}  // namespace sheriff::sim
