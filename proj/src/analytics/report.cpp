#include "sheriff/analytics/report.hpp"

#include "sheriff/core/time.hpp"

namespace sheriff::analytics {

using nlohmann::json;

namespace {

json interval_json(const fx::RefInterval& i) {
  return {{"lo", format_fixed(i.lo, 4)}, {"hi", format_fixed(i.hi, 4)}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string ratio_string(const Rational& r) { return format_fixed(r, 6); }

json to_json(const RatioStats& s) {
  return {{"min", ratio_string(s.min)},
          {"q25", ratio_string(s.q25)},
          {"median", ratio_string(s.median)},
          {"q75", ratio_string(s.q75)},
          {"max", ratio_string(s.max)}};
}

json to_json(const RetailerSummary& s) {
  return {{"domain", s.domain},
          {"n_products", s.n_products},
          {"n_distinct_products", s.n_distinct_products},
          {"variation_extent", s.variation_extent},
          {"ratio_stats", to_json(s.ratio_stats)}};
}

json to_json(const ProductProfile& p) {
  json obs = json::array();
  for (std::size_t i = 0; i < p.observations.size(); ++i) {
    obs.push_back({{"vantage", p.observations[i].vantage},
                   {"price", p.observations[i].money.currency + " " + p.observations[i].money.amount.to_string(2)},
                   {"reference", interval_json(p.intervals[i])}});
  }
  return {{"product_uri", p.product_uri},
          {"domain", p.domain},
          {"wave", p.wave_id},
          {"min_price", interval_json(p.min_price)},
          {"max_min_ratio", ratio_string(p.max_min_ratio)},
          {"gate",
           {{"passed", p.gate.passed},
            {"observed_gap", ratio_string(p.gate.observed_gap)},
            {"max_currency_gap", ratio_string(p.gate.max_currency_gap)}}},
          {"observations", std::move(obs)}};
}

json to_json(const VariationModel& m) {
  return {{"domain", m.domain},     {"location", m.location},   {"a", m.a},
          {"b", m.b},               {"residual", m.residual},   {"n_pairs", m.n_pairs},
          {"class", to_string(m.cls)}, {"degenerate_spread", m.degenerate_spread}};
}

json to_json(const LocationReport& r) {
  json summaries = json::array();
  for (const auto& s : r.summaries) {
    summaries.push_back({{"location", s.location}, {"n", s.n}, {"cheapest", s.cheapest}, {"stats", to_json(s.stats)}});
  }
  json never = json::array();
  for (const auto& n : r.never_cheapest) {
    never.push_back({{"domain", n.domain}, {"location", n.location}, {"products", n.products}});
  }
  return {{"locations", std::move(summaries)}, {"never_cheapest", std::move(never)}, {"n_ratios", r.ratios.size()}};
}

json to_json(const PairwiseGrid& g) {
  json cells = json::array();
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    for (std::size_t j = 0; j < g.cells[i].size(); ++j) {
      if (i == j) continue;
      json points = json::array();
      for (const auto& pt : g.cells[i][j]) points.push_back({to_double(pt.x), to_double(pt.y)});
      cells.push_back({{"row", g.locations[i]}, {"col", g.locations[j]}, {"points", std::move(points)}});
    }
  }
  return {{"domain", g.domain}, {"locations", g.locations}, {"cells", std::move(cells)}};
}

json to_json(const std::vector<ThirdPartyPresence>& presence) {
  json out = json::array();
  for (const auto& p : presence) out.push_back({{"party", p.party}, {"retailers", p.retailers}, {"fraction", p.fraction}});
  return out;
}

json to_json(const PersonaReport& r) {
  json prices = json::array();
  for (const auto& p : r.prices) prices.push_back({{"persona", p.persona}, {"price", p.canonical}});
  json diffs = json::array();
  for (const auto& d : r.differences) {
    diffs.push_back({{"a", d.a}, {"b", d.b}, {"ratio", ratio_string(d.ratio)}, {"fields", d.fields}});
  }
  return {{"product_uri", r.product_uri},
          {"vantage", r.vantage},
          {"wave", r.wave_id},
          {"prices", std::move(prices)},
          {"differences", std::move(diffs)},
          {"any_difference", r.any_difference()}};
}

json to_json(const std::vector<PriceBand>& bands) {
  json out = json::array();
  for (const auto& b : bands) {
    out.push_back({{"lower", format_fixed(b.lower, 2)},
                   {"upper", format_fixed(b.upper, 2)},
                   {"count", b.count},
                   {"max_ratio", ratio_string(b.max_ratio)}});
  }
  return out;
}

json report_envelope(const std::string& kind, json body) {
  return {{"schema", kReportSchemaVersion},
          {"kind", kind},
          {"generated_at", format_timestamp(now())},
          {"body", std::move(body)}};
}

void write_ratio_points_csv(std::ostream& out, const std::vector<RatioPoint>& points) {
  out << "domain,product_uri,wave,min_price,ratio\n";
  for (const auto& p : points) {
    out << csv_field(p.domain) << ',' << csv_field(p.product_uri) << ',' << csv_field(p.wave_id) << ','
        << format_fixed(p.min_price, 4) << ',' << ratio_string(p.ratio) << '\n';
  }
}

void write_pairs_csv(std::ostream& out, const std::string& domain, const std::string& location,
                     const std::vector<PricePair>& pairs) {
  out << "domain,location,p_min,p_loc\n";
  for (const auto& p : pairs) {
    out << csv_field(domain) << ',' << csv_field(location) << ',' << format_fixed(p.p_min, 4) << ','
        << format_fixed(p.p_loc, 4) << '\n';
  }
}

void write_location_ratios_csv(std::ostream& out, const std::vector<LocationRatio>& ratios) {
  out << "domain,product_uri,wave,location,rho\n";
  for (const auto& r : ratios) {
    out << csv_field(r.domain) << ',' << csv_field(r.product_uri) << ',' << csv_field(r.wave_id) << ','
        << csv_field(r.location) << ',' << ratio_string(r.rho) << '\n';
  }
}

void write_grid_csv(std::ostream& out, const PairwiseGrid& grid) {
  out << "domain,row,col,product_uri,x,y\n";
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    for (std::size_t j = 0; j < grid.cells[i].size(); ++j) {
      for (const auto& pt : grid.cells[i][j]) {
        out << csv_field(grid.domain) << ',' << csv_field(grid.locations[i]) << ',' << csv_field(grid.locations[j])
            << ',' << csv_field(pt.product_uri) << ',' << ratio_string(pt.x) << ',' << ratio_string(pt.y) << '\n';
      }
    }
  }
}

}  // namespace sheriff::analytics
