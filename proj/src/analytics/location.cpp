#include "sheriff/analytics/location.hpp"

#include <algorithm>

namespace sheriff::analytics {

std::vector<LocationRatio> location_ratios_of(const ProductProfile& profile) {
  std::vector<LocationRatio> out;
  const fx::RefInterval& lowest = profile.intervals.at(profile.min_index);
  for (std::size_t i = 0; i < profile.observations.size(); ++i) {
    const fx::RefInterval& at = profile.intervals[i];
    Rational rho = fx::genuinely_above(at, lowest) ? at.lo / lowest.hi : Rational(1);
    out.push_back({profile.domain, profile.product_uri, profile.wave_id, profile.observations[i].vantage, rho});
  }
  return out;
}

LocationReport location_ratios(const std::vector<ProductProfile>& profiles) {
  LocationReport report;
  std::map<std::string, std::vector<Rational>> by_location;
  std::map<std::string, std::size_t> cheapest;
  // (domain, location) -> (observed, above minimum)
  std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> per_domain;

  for (const auto& profile : profiles) {
    for (auto& r : location_ratios_of(profile)) {
      by_location[r.location].push_back(r.rho);
      if (r.rho == 1) ++cheapest[r.location];
      auto& counts = per_domain[{r.domain, r.location}];
      ++counts.first;
      if (r.rho > 1) ++counts.second;
      report.ratios.push_back(std::move(r));
    }
  }
  for (auto& [location, values] : by_location) {
    LocationSummary s;
    s.location = location;
    s.n = values.size();
    s.cheapest = cheapest[location];
    s.stats = ratio_stats(std::move(values));
    report.summaries.push_back(std::move(s));
  }
  for (const auto& [key, counts] : per_domain) {
    if (counts.first > 0 && counts.first == counts.second) {
      report.never_cheapest.push_back({key.first, key.second, counts.first});
    }
  }
  return report;
}

PairwiseGrid pairwise_grid(const std::string& domain, const std::vector<std::string>& locations,
                           const std::vector<ProductProfile>& profiles) {
  PairwiseGrid grid;
  grid.domain = domain;
  grid.locations = locations;
  std::size_t n = locations.size();
  grid.cells.assign(n, std::vector<std::vector<GridPoint>>(n));
  for (const auto& profile : profiles) {
    if (profile.domain != domain) continue;
    std::vector<const Rational*> rho(n, nullptr);
    auto ratios = location_ratios_of(profile);
    for (std::size_t k = 0; k < n; ++k) {
      for (const auto& r : ratios) {
        if (r.location == locations[k]) {
          rho[k] = &r.rho;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !rho[i] || !rho[j]) continue;
        grid.cells[i][j].push_back({profile.product_uri, profile.wave_id, *rho[j], *rho[i]});
      }
    }
  }
  return grid;
}

}  // namespace sheriff::analytics
