#include "sheriff/analytics/summary.hpp"

#include <set>

namespace sheriff::analytics {

RetailerSummary retailer_summary(const std::string& domain, const std::vector<ProductProfile>& profiles) {
  RetailerSummary s;
  s.domain = domain;
  std::vector<Rational> ratios;
  std::set<std::string> products;
  std::size_t passed = 0;
  for (const auto& p : profiles) {
    if (p.domain != domain) continue;
    ratios.push_back(p.max_min_ratio);
    products.insert(p.product_uri);
    if (p.gate.passed) ++passed;
  }
  s.n_products = ratios.size();
  s.n_distinct_products = products.size();
  s.variation_extent = ratios.empty() ? 0.0 : static_cast<double>(passed) / static_cast<double>(ratios.size());
  s.ratio_stats = ratio_stats(std::move(ratios));
  return s;
}

RetailerSummary retailer_summary_from_ratios(const std::string& domain, std::vector<Rational> ratios) {
  RetailerSummary s;
  s.domain = domain;
  s.n_products = ratios.size();
  std::size_t passed = 0;
  for (const auto& r : ratios) {
    if (r > 1) ++passed;
  }
  s.variation_extent = ratios.empty() ? 0.0 : static_cast<double>(passed) / static_cast<double>(ratios.size());
  s.ratio_stats = ratio_stats(std::move(ratios));
  return s;
}

std::vector<RatioPoint> ratio_vs_price(const std::vector<ProductProfile>& profiles) {
  std::vector<RatioPoint> points;
  points.reserve(profiles.size());
  for (const auto& p : profiles) {
    points.push_back({p.domain, p.product_uri, p.wave_id, p.min_price.midpoint(), p.max_min_ratio});
  }
  return points;
}

std::vector<PriceBand> ratio_bands(const std::vector<RatioPoint>& points, const std::vector<Rational>& edges) {
  std::vector<PriceBand> bands;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) throw InvalidArgument("band edges must increase");
    bands.push_back({edges[i], edges[i + 1], 0, Rational(1)});
  }
  for (const auto& pt : points) {
    for (auto& band : bands) {
      if (band.lower <= pt.min_price && pt.min_price < band.upper) {
        ++band.count;
        if (pt.ratio > band.max_ratio) band.max_ratio = pt.ratio;
        break;
      }
    }
  }
  return bands;
}

std::vector<Rational> decade_edges(int from_exponent, int to_exponent) {
  std::vector<Rational> edges;
  for (int e = from_exponent; e <= to_exponent; ++e) edges.push_back(pow10(e));
  return edges;
}

}  // namespace sheriff::analytics
