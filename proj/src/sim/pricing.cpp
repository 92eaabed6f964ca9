#include "sheriff/sim/pricing.hpp"

#include <algorithm>
#include <map>

namespace sheriff::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

const PersonaRule* matching_persona(const PricingPolicy& policy, const RequestProfile& request) {
  for (const auto& rule : policy.persona_rules) {
    const auto& source = rule.source == PersonaRule::Source::Cookie ? request.cookies : request.headers;
    auto it = source.find(rule.name);
    if (it != source.end() && it->second == rule.value) return &rule;
  }
  return nullptr;
}

}  // namespace

AbArm ab_arm(const PricingPolicy& policy, std::string_view session_id) {
  if (policy.ab_noise.probability <= 0.0 || policy.ab_noise.epsilon == 0) return AbArm::Control;
  std::uint64_t h = splitmix64(policy.seed ^ fnv1a(session_id));
  double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  if (u >= policy.ab_noise.probability) return AbArm::Control;
  return (splitmix64(h) & 1) ? AbArm::Up : AbArm::Down;
}

Money price_for(const PricingPolicy& policy, std::string_view product_id, std::string_view region,
                const RequestProfile& request) {
  const CatalogItem& item = policy.product(product_id);
  const RegionRule& rule = policy.region(region);

  const std::string& item_currency = item.currency.empty() ? policy.fx_base : item.currency;
  Rational price = item.base_price.to_rational() / policy.rate_for(item_currency);
  if (const PersonaRule* persona = matching_persona(policy, request)) {
    price = price * persona->multiplier + persona->surcharge.to_rational();
  }
  price = price * rule.multiplier + rule.surcharge.to_rational();
  switch (ab_arm(policy, request.session_id)) {
    case AbArm::Up:
      price *= 1 + policy.ab_noise.epsilon;
      break;
    case AbArm::Down:
      price *= 1 - policy.ab_noise.epsilon;
      break;
    case AbArm::Control:
      break;
  }
  const std::string& display = rule.display_currency.empty() ? policy.fx_base : rule.display_currency;
  price *= policy.rate_for(display);
  return Money::of(Decimal::from_rational(round_to(price, 2)), display);
}

std::string resolve_region(const PricingPolicy& policy, const std::optional<std::string>& region_header,
                           std::string_view remote_address) {
  if (region_header) {
    if (!policy.regions.count(*region_header)) {
      throw UnknownRegion(policy.domain + ": unknown region '" + *region_header + "'");
    }
    return *region_header;
  }
  const AddressBlock* best = nullptr;
  try {
    std::uint32_t address = parse_ipv4(remote_address);
    for (const auto& block : policy.address_blocks) {
      if (block.contains(address) && (!best || block.prefix_length > best->prefix_length)) best = &block;
    }
  } catch (const InvalidArgument&) {
  }
  if (best) return best->region;
  if (!policy.default_region.empty()) return policy.default_region;
  throw UnknownRegion(policy.domain + ": no region for address " + std::string(remote_address));
}

std::vector<fx::RateWindow> published_windows(const std::vector<PricingPolicy>& fleet, Date date,
                                              const Rational& relative_half_width) {
  struct Span {
    std::string base;
    Rational lo;
    Rational hi;
  };
  std::map<std::string, Span> spans;
  for (const auto& policy : fleet) {
    for (const auto& [code, rate] : policy.display_rates) {
      if (code == policy.fx_base) continue;
      auto [it, fresh] = spans.try_emplace(code, Span{policy.fx_base, rate, rate});
      if (!fresh) {
        if (it->second.base != policy.fx_base) throw InvalidPolicy("fleet mixes fx bases for " + code);
        it->second.lo = std::min(it->second.lo, rate);
        it->second.hi = std::max(it->second.hi, rate);
      }
    }
  }
  std::vector<fx::RateWindow> windows;
  for (const auto& [code, span] : spans) {
    windows.push_back(fx::RateWindow{date, span.base, code, span.lo * (1 - relative_half_width),
                                     span.hi * (1 + relative_half_width)});
  }
  return windows;
}

}  // namespace sheriff::sim
