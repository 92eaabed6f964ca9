#pragma once

#include "sheriff/core/decimal.hpp"
#include "sheriff/core/errors.hpp"
#include "sheriff/core/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sheriff::sim {

class InvalidPolicy : public Error {
 public:
  using Error::Error;
};

class UnknownProduct : public Error {
 public:
  using Error::Error;
};

class UnknownRegion : public Error {
 public:
  using Error::Error;
};

struct CatalogItem {
  std::string id;
  std::string name;
  Decimal base_price;
  std::string currency;  // defaults to the policy's fx_base
};

// Price in a region: (base * multiplier + surcharge) shown in
// display_currency. The surcharge is in fx_base units.
struct RegionRule {
  Rational multiplier{1};
  Decimal surcharge;
  std::string display_currency;
};

// Applied to the base price before region rules when a request carries
// the named cookie or header with the given value. First match wins.
struct PersonaRule {
  enum class Source { Cookie, Header };
  Source source = Source::Cookie;
  std::string name;
  std::string value;
  Rational multiplier{1};
  Decimal surcharge;
};

// With probability `probability` a session lands in an experiment arm that
// scales the price by (1 + epsilon) or (1 - epsilon), chosen per session.
struct AbNoise {
  double probability = 0.0;
  Rational epsilon{0};
};

struct AddressBlock {
  std::uint32_t network = 0;
  int prefix_length = 32;
  std::string region;

  bool contains(std::uint32_t address) const;
};

struct PricingPolicy {
  std::string domain;
  int template_id = 0;
  std::string fx_base = "USD";
  std::vector<CatalogItem> catalog;
  std::map<std::string, RegionRule> regions;
  std::vector<AddressBlock> address_blocks;
  std::string default_region;
  // Units of each currency per one unit of fx_base; fx_base itself is 1.
  std::map<std::string, Rational> display_rates;
  std::vector<PersonaRule> persona_rules;
  AbNoise ab_noise;
  std::uint64_t seed = 0;
  std::vector<std::string> third_parties;
  int listing_page_size = 50;

  // Throws InvalidPolicy.
  void validate() const;
  const CatalogItem& product(std::string_view id) const;
  const RegionRule& region(std::string_view name) const;
  Rational rate_for(std::string_view currency) const;
};

nlohmann::json to_json(const PricingPolicy& policy);
PricingPolicy policy_from_json(const nlohmann::json& j);

// Every *.json file in the directory, sorted by file name.
std::vector<PricingPolicy> load_policy_dir(const std::string& dir);
void save_policy_dir(const std::vector<PricingPolicy>& policies, const std::string& dir);

AddressBlock parse_cidr(std::string_view cidr, std::string region);
std::uint32_t parse_ipv4(std::string_view address);

}  // namespace sheriff::sim
