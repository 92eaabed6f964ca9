#include "sheriff/sim/policy.hpp"

#include "sheriff/core/money.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace sheriff::sim {

namespace {

using nlohmann::json;

std::string exact_decimal(const Rational& value) {
  for (int digits = 0; digits <= 18; ++digits) {
    Rational scaled = value * pow10(digits);
    if (denominator(scaled) == 1) return format_fixed(value, digits);
  }
  throw InvalidPolicy("value is not a terminating decimal");
}

Rational rational_field(const json& j, const char* key, const Rational& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  throw InvalidPolicy(std::string("field '") + key + "' must be a decimal string");
}

Decimal decimal_field(const json& j, const char* key) {
  if (!j.contains(key)) return Decimal{};
  const json& v = j.at(key);
  if (v.is_string()) return Decimal::parse(v.get<std::string>());
  if (v.is_number_integer()) return Decimal::from_integer(v.get<long long>());
  throw InvalidPolicy(std::string("field '") + key + "' must be a decimal string");
}

std::string format_ipv4(std::uint32_t a) {
  return std::to_string(a >> 24) + "." + std::to_string((a >> 16) & 0xff) + "." + std::to_string((a >> 8) & 0xff) +
         "." + std::to_string(a & 0xff);
}

}  // namespace

bool AddressBlock::contains(std::uint32_t address) const {
  if (prefix_length == 0) return true;
  std::uint32_t mask = prefix_length >= 32 ? 0xffffffffu : ~(0xffffffffu >> prefix_length);
  return (address & mask) == (network & mask);
}

std::uint32_t parse_ipv4(std::string_view address) {
  auto fail = [&] { return InvalidArgument("not an IPv4 address: '" + std::string(address) + "'"); };
  std::uint32_t result = 0;
  std::string_view rest = address;
  for (int part = 0; part < 4; ++part) {
    std::size_t dot = rest.find('.');
    if ((part < 3) != (dot != std::string_view::npos)) throw fail();
    std::string_view octet = rest.substr(0, dot);
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(octet.data(), octet.data() + octet.size(), value);
    if (octet.empty() || ec != std::errc{} || ptr != octet.data() + octet.size() || value > 255) throw fail();
    result = (result << 8) | value;
    if (dot != std::string_view::npos) rest.remove_prefix(dot + 1);
  }
  return result;
}

AddressBlock parse_cidr(std::string_view cidr, std::string region) {
  AddressBlock block;
  block.region = std::move(region);
  std::size_t slash = cidr.find('/');
  block.network = parse_ipv4(cidr.substr(0, slash));
  if (slash != std::string_view::npos) {
    std::string_view len = cidr.substr(slash + 1);
    auto [ptr, ec] = std::from_chars(len.data(), len.data() + len.size(), block.prefix_length);
    if (ec != std::errc{} || ptr != len.data() + len.size() || block.prefix_length < 0 ||
        block.prefix_length > 32) {
      throw InvalidPolicy("bad prefix length in '" + std::string(cidr) + "'");
    }
  }
  return block;
}

void PricingPolicy::validate() const {
  if (domain.empty()) throw InvalidPolicy("policy has no domain");
  if (!is_iso_code_shape(fx_base)) throw InvalidPolicy(domain + ": bad fx_base '" + fx_base + "'");
  if (template_id < 0) throw InvalidPolicy(domain + ": negative template id");
  if (catalog.empty()) throw InvalidPolicy(domain + ": empty catalog");
  if (regions.empty()) throw InvalidPolicy(domain + ": no regions");
  std::set<std::string> ids;
  for (const auto& item : catalog) {
    if (item.id.empty()) throw InvalidPolicy(domain + ": product without id");
    if (!ids.insert(item.id).second) throw InvalidPolicy(domain + ": duplicate product '" + item.id + "'");
    if (!item.base_price.is_positive()) throw InvalidPolicy(domain + ": non-positive price for '" + item.id + "'");
    rate_for(item.currency.empty() ? fx_base : item.currency);
  }
  for (const auto& [name, rule] : regions) {
    if (rule.multiplier <= 0) throw InvalidPolicy(domain + ": multiplier must be positive in " + name);
    rate_for(rule.display_currency.empty() ? fx_base : rule.display_currency);
  }
  for (const auto& [code, rate] : display_rates) {
    if (rate <= 0) throw InvalidPolicy(domain + ": non-positive rate for " + code);
  }
  if (!default_region.empty() && !regions.count(default_region)) {
    throw InvalidPolicy(domain + ": default region '" + default_region + "' has no rule");
  }
  for (const auto& block : address_blocks) {
    if (!regions.count(block.region)) throw InvalidPolicy(domain + ": address block for unknown region");
  }
  for (const auto& rule : persona_rules) {
    if (rule.name.empty()) throw InvalidPolicy(domain + ": persona rule without a name");
    if (rule.multiplier <= 0) throw InvalidPolicy(domain + ": persona multiplier must be positive");
  }
  if (!(ab_noise.probability >= 0.0 && ab_noise.probability <= 1.0)) {
    throw InvalidPolicy(domain + ": ab probability outside [0, 1]");
  }
  if (ab_noise.epsilon < 0 || ab_noise.epsilon >= 1) throw InvalidPolicy(domain + ": ab epsilon outside [0, 1)");
  if (listing_page_size < 1) throw InvalidPolicy(domain + ": listing page size must be positive");
}

const CatalogItem& PricingPolicy::product(std::string_view id) const {
  for (const auto& item : catalog) {
    if (item.id == id) return item;
  }
  throw UnknownProduct(domain + ": unknown product '" + std::string(id) + "'");
}

const RegionRule& PricingPolicy::region(std::string_view name) const {
  auto it = regions.find(std::string(name));
  if (it == regions.end()) throw UnknownRegion(domain + ": unknown region '" + std::string(name) + "'");
  return it->second;
}

Rational PricingPolicy::rate_for(std::string_view currency) const {
  if (currency == fx_base) return Rational(1);
  auto it = display_rates.find(std::string(currency));
  if (it == display_rates.end()) {
    throw InvalidPolicy(domain + ": no simulator rate for " + std::string(currency));
  }
  return it->second;
}

json to_json(const PricingPolicy& p) {
  json catalog = json::array();
  for (const auto& item : p.catalog) {
    json entry = {{"id", item.id}, {"name", item.name}, {"base_price", item.base_price.to_string()}};
    if (!item.currency.empty()) entry["currency"] = item.currency;
    catalog.push_back(std::move(entry));
  }
  json regions = json::object();
  for (const auto& [name, rule] : p.regions) {
    json r = {{"multiplier", exact_decimal(rule.multiplier)}, {"surcharge", rule.surcharge.to_string()}};
    if (!rule.display_currency.empty()) r["display_currency"] = rule.display_currency;
    regions[name] = std::move(r);
  }
  json blocks = json::array();
  for (const auto& b : p.address_blocks) {
    blocks.push_back({{"cidr", format_ipv4(b.network) + "/" + std::to_string(b.prefix_length)}, {"region", b.region}});
  }
  json fx = json::object();
  for (const auto& [code, rate] : p.display_rates) fx[code] = exact_decimal(rate);
  json personas = json::array();
  for (const auto& r : p.persona_rules) {
    personas.push_back({{r.source == PersonaRule::Source::Cookie ? "cookie" : "header", r.name},
                        {"value", r.value},
                        {"multiplier", exact_decimal(r.multiplier)},
                        {"surcharge", r.surcharge.to_string()}});
  }
  return {{"domain", p.domain},
          {"template", p.template_id},
          {"fx_base", p.fx_base},
          {"catalog", std::move(catalog)},
          {"regions", std::move(regions)},
          {"address_blocks", std::move(blocks)},
          {"default_region", p.default_region},
          {"fx", std::move(fx)},
          {"persona_rules", std::move(personas)},
          {"ab_noise", {{"p", p.ab_noise.probability}, {"epsilon", exact_decimal(p.ab_noise.epsilon)}}},
          {"seed", p.seed},
          {"third_parties", p.third_parties},
          {"listing_page_size", p.listing_page_size}};
}

PricingPolicy policy_from_json(const json& j) {
  PricingPolicy p;
  try {
    p.domain = j.at("domain").get<std::string>();
    p.template_id = j.value("template", 0);
    p.fx_base = j.value("fx_base", std::string("USD"));
    for (const auto& entry : j.at("catalog")) {
      CatalogItem item;
      item.id = entry.at("id").get<std::string>();
      item.name = entry.value("name", item.id);
      item.base_price = decimal_field(entry, "base_price");
      item.currency = entry.value("currency", std::string());
      p.catalog.push_back(std::move(item));
    }
    for (const auto& [name, r] : j.at("regions").items()) {
      RegionRule rule;
      rule.multiplier = rational_field(r, "multiplier", Rational(1));
      rule.surcharge = decimal_field(r, "surcharge");
      rule.display_currency = r.value("display_currency", std::string());
      p.regions.emplace(name, std::move(rule));
    }
    if (j.contains("address_blocks")) {
      for (const auto& b : j.at("address_blocks")) {
        p.address_blocks.push_back(parse_cidr(b.at("cidr").get<std::string>(), b.at("region").get<std::string>()));
      }
    }
    p.default_region = j.value("default_region", std::string());
    if (j.contains("fx")) {
      for (const auto& [code, rate] : j.at("fx").items()) {
        p.display_rates[code] = rate.is_string() ? parse_rational(rate.get<std::string>()) : Rational(rate.get<long long>());
      }
    }
    if (j.contains("persona_rules")) {
      for (const auto& r : j.at("persona_rules")) {
        PersonaRule rule;
        if (r.contains("cookie")) {
          rule.source = PersonaRule::Source::Cookie;
          rule.name = r.at("cookie").get<std::string>();
        } else {
          rule.source = PersonaRule::Source::Header;
          rule.name = r.at("header").get<std::string>();
          std::transform(rule.name.begin(), rule.name.end(), rule.name.begin(),
                         [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        }
        rule.value = r.at("value").get<std::string>();
        rule.multiplier = rational_field(r, "multiplier", Rational(1));
        rule.surcharge = decimal_field(r, "surcharge");
        p.persona_rules.push_back(std::move(rule));
      }
    }
    if (j.contains("ab_noise")) {
      p.ab_noise.probability = j.at("ab_noise").value("p", 0.0);
      p.ab_noise.epsilon = rational_field(j.at("ab_noise"), "epsilon", Rational(0));
    }
    p.seed = j.value("seed", std::uint64_t{0});
    p.third_parties = j.value("third_parties", std::vector<std::string>{});
    p.listing_page_size = j.value("listing_page_size", 50);
  } catch (const json::exception& e) {
    throw InvalidPolicy(std::string("malformed policy: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidPolicy(std::string("malformed policy: ") + e.what());
  }
  p.validate();
  return p;
}

std::vector<PricingPolicy> load_policy_dir(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<PricingPolicy> policies;
  for (const auto& path : files) {
    std::ifstream in(path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InvalidPolicy(path.string() + ": " + e.what());
    }
    policies.push_back(policy_from_json(j));
  }
  return policies;
}

void save_policy_dir(const std::vector<PricingPolicy>& policies, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& p : policies) {
    std::ofstream out(std::filesystem::path(dir) / (p.domain + ".json"));
    out << to_json(p).dump(2) << "\n";
    if (!out) throw Error("cannot write policy for " + p.domain);
  }
}

}  // namespace sheriff::sim
