#pragma once

#include "sheriff/core/money.hpp"
#include "sheriff/core/time.hpp"

#include <json.hpp>

#include <set>
#include <string>

namespace sheriff {

enum class GateFlag { NoiseSuspect, ShippingIncludedUnknown, TaxIncludedUnknown };

std::string to_string(GateFlag flag);
GateFlag gate_flag_from_string(std::string_view text);

// One extracted price. `check_id` plus `repetition` identifies the wave the
// price was fetched in; `persona` is empty for the default fetch profile.
struct PriceObservation {
  std::string check_id;
  int repetition = 0;
  std::string vantage;
  std::string persona;
  std::string product_uri;
  std::string domain;
  Money money;
  Timestamp fetched_at{};
  Millis fetch_latency{0};
  std::string snapshot_ref;
  std::set<GateFlag> gate_flags;

  // Identity inside the store; a second append with the same key is a no-op.
  std::string key() const;
};

inline constexpr int kObservationSchemaVersion = 1;

nlohmann::json to_json(const PriceObservation& obs);
PriceObservation observation_from_json(const nlohmann::json& j);

}  // namespace sheriff
