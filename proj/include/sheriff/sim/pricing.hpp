#pragma once

#include "sheriff/core/money.hpp"
#include "sheriff/fx/rate_table.hpp"
#include "sheriff/sim/policy.hpp"

#include <map>
#include <optional>
#include <string>

namespace sheriff::sim {

// What the simulator sees of a request. Header names are lower-case.
struct RequestProfile {
  std::map<std::string, std::string> headers;
  std::map<std::string, std::string> cookies;
  std::string session_id;
};

enum class AbArm { Control, Up, Down };

// Deterministic in (policy seed, session id), hence sticky per session.
AbArm ab_arm(const PricingPolicy& policy, std::string_view session_id);

// Ground-truth price, rounded to cents in the display currency. Throws
// UnknownProduct or UnknownRegion.
Money price_for(const PricingPolicy& policy, std::string_view product_id, std::string_view region,
                const RequestProfile& request);

// X-Sim-Region header first, then the address blocks, then the default.
// Throws UnknownRegion.
std::string resolve_region(const PricingPolicy& policy, const std::optional<std::string>& region_header,
                           std::string_view remote_address);

// Rate windows for every display currency used by the fleet, centred on
// the simulator's fixed rates with the given relative half-width, so any
// pure currency localization stays inside the published window.
std::vector<fx::RateWindow> published_windows(const std::vector<PricingPolicy>& fleet, Date date,
                                              const Rational& relative_half_width);

}  // namespace sheriff::sim
