#include "sheriff/core/observation.hpp"

#include "sheriff/core/errors.hpp"

namespace sheriff {

std::string to_string(GateFlag flag) {
  switch (flag) {
    case GateFlag::NoiseSuspect: return "NoiseSuspect";
    case GateFlag::ShippingIncludedUnknown: return "ShippingIncludedUnknown";
    case GateFlag::TaxIncludedUnknown: return "TaxIncludedUnknown";
  }
  return "?";
}

GateFlag gate_flag_from_string(std::string_view text) {
  if (text == "NoiseSuspect") return GateFlag::NoiseSuspect;
  if (text == "ShippingIncludedUnknown") return GateFlag::ShippingIncludedUnknown;
  if (text == "TaxIncludedUnknown") return GateFlag::TaxIncludedUnknown;
  throw InvalidArgument("unknown gate flag '" + std::string(text) + "'");
}

std::string PriceObservation::key() const {
  return check_id + "|" + std::to_string(repetition) + "|" + vantage + "|" + persona;
}

nlohmann::json to_json(const PriceObservation& obs) {
  nlohmann::json flags = nlohmann::json::array();
  for (GateFlag f : obs.gate_flags) flags.push_back(to_string(f));
  return {
      {"v", kObservationSchemaVersion},
      {"check_id", obs.check_id},
      {"repetition", obs.repetition},
      {"vantage", obs.vantage},
      {"persona", obs.persona},
      {"product_uri", obs.product_uri},
      {"domain", obs.domain},
      {"amount", obs.money.amount.to_string()},
      {"currency", obs.money.currency},
      {"fetched_at", format_timestamp(obs.fetched_at)},
      {"latency_ms", obs.fetch_latency.count()},
      {"snapshot", obs.snapshot_ref},
      {"flags", flags},
  };
}

PriceObservation observation_from_json(const nlohmann::json& j) {
  int version = j.at("v").get<int>();
  if (version != kObservationSchemaVersion) {
    throw InvalidArgument("unsupported observation schema version " + std::to_string(version));
  }
  PriceObservation obs;
  obs.check_id = j.at("check_id").get<std::string>();
  obs.repetition = j.value("repetition", 0);
  obs.vantage = j.at("vantage").get<std::string>();
  obs.persona = j.value("persona", "");
  obs.product_uri = j.at("product_uri").get<std::string>();
  obs.domain = j.at("domain").get<std::string>();
  obs.money = Money::of(j.at("amount").get<std::string>(), j.at("currency").get<std::string>());
  obs.fetched_at = parse_timestamp(j.at("fetched_at").get<std::string>());
  obs.fetch_latency = Millis(j.value("latency_ms", 0));
  obs.snapshot_ref = j.value("snapshot", "");
  for (const auto& f : j.value("flags", nlohmann::json::array())) {
    obs.gate_flags.insert(gate_flag_from_string(f.get<std::string>()));
  }
  return obs;
}

}  // namespace sheriff
