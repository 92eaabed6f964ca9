#pragma once

#include "sheriff/analytics/profile.hpp"
#include "sheriff/analytics/stats.hpp"

#include <map>
#include <string>
#include <vector>

namespace sheriff::analytics {

// Price at a location over the minimum across locations for one profile.
// Gate-consistent: 1 unless the location is genuinely above the minimum,
// otherwise lo(location) / hi(minimum).
struct LocationRatio {
  std::string domain;
  std::string product_uri;
  std::string wave_id;
  std::string location;
  Rational rho{1};
};

struct LocationSummary {
  std::string location;
  std::size_t n = 0;
  std::size_t cheapest = 0;  // rho == 1
  RatioStats stats;
};

struct NeverCheapest {
  std::string domain;
  std::string location;
  std::size_t products = 0;
};

struct LocationReport {
  std::vector<LocationRatio> ratios;
  std::vector<LocationSummary> summaries;  // sorted by location
  std::vector<NeverCheapest> never_cheapest;  // sorted by (domain, location)
};

std::vector<LocationRatio> location_ratios_of(const ProductProfile& profile);
LocationReport location_ratios(const std::vector<ProductProfile>& profiles);

struct GridPoint {
  std::string product_uri;
  std::string wave_id;
  Rational x;  // rho at the column location
  Rational y;  // rho at the row location
};

struct PairwiseGrid {
  std::string domain;
  std::vector<std::string> locations;
  // cells[i][j]: products seen at both locations i and j; diagonal empty.
  std::vector<std::vector<std::vector<GridPoint>>> cells;
};

PairwiseGrid pairwise_grid(const std::string& domain, const std::vector<std::string>& locations,
                           const std::vector<ProductProfile>& profiles);

}  // namespace sheriff::analytics
