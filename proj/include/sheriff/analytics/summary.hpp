#pragma once

#include "sheriff/analytics/profile.hpp"
#include "sheriff/analytics/stats.hpp"

#include <string>
#include <vector>

namespace sheriff::analytics {

struct RetailerSummary {
  std::string domain;
  std::size_t n_products = 0;  // product-wave profiles
  std::size_t n_distinct_products = 0;
  double variation_extent = 0.0;  // fraction of profiles passing the gate
  RatioStats ratio_stats;
};

// Profiles from other domains are ignored.
RetailerSummary retailer_summary(const std::string& domain, const std::vector<ProductProfile>& profiles);
// Same statistics computed from bare ratios.
RetailerSummary retailer_summary_from_ratios(const std::string& domain, std::vector<Rational> ratios);

struct RatioPoint {
  std::string domain;
  std::string product_uri;
  std::string wave_id;
  Rational min_price;  // midpoint of the minimum interval, reference units
  Rational ratio;
};

std::vector<RatioPoint> ratio_vs_price(const std::vector<ProductProfile>& profiles);

struct PriceBand {
  Rational lower;  // inclusive
  Rational upper;  // exclusive
  std::size_t count = 0;
  Rational max_ratio{1};
};

// Bands between consecutive edges; points outside every band are dropped.
std::vector<PriceBand> ratio_bands(const std::vector<RatioPoint>& points, const std::vector<Rational>& edges);
std::vector<Rational> decade_edges(int from_exponent, int to_exponent);

}  // namespace sheriff::analytics
