#pragma once

#include "sheriff/analytics/location.hpp"
#include "sheriff/analytics/model.hpp"
#include "sheriff/analytics/persona.hpp"
#include "sheriff/analytics/summary.hpp"
#include "sheriff/analytics/thirdparty.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace sheriff::analytics {

inline constexpr int kReportSchemaVersion = 1;

// Ratios are rendered with six fraction digits in reports.
std::string ratio_string(const Rational& r);

nlohmann::json to_json(const RatioStats& s);
nlohmann::json to_json(const RetailerSummary& s);
nlohmann::json to_json(const ProductProfile& p);
nlohmann::json to_json(const VariationModel& m);
nlohmann::json to_json(const LocationReport& r);
nlohmann::json to_json(const PairwiseGrid& g);
nlohmann::json to_json(const std::vector<ThirdPartyPresence>& presence);
nlohmann::json to_json(const PersonaReport& r);
nlohmann::json to_json(const std::vector<PriceBand>& bands);

// {"schema": 1, "kind": kind, "generated_at": ..., "body": body}
nlohmann::json report_envelope(const std::string& kind, nlohmann::json body);

void write_ratio_points_csv(std::ostream& out, const std::vector<RatioPoint>& points);
void write_pairs_csv(std::ostream& out, const std::string& domain, const std::string& location,
                     const std::vector<PricePair>& pairs);
void write_location_ratios_csv(std::ostream& out, const std::vector<LocationRatio>& ratios);
void write_grid_csv(std::ostream& out, const PairwiseGrid& grid);

}  // namespace sheriff::analytics
