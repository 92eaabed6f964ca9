#include "sheriff/analytics/model.hpp"

#include <cmath>

namespace sheriff::analytics {

std::string to_string(VariationClass c) {
  switch (c) {
    case VariationClass::Multiplicative: return "multiplicative";
    case VariationClass::Additive: return "additive";
    case VariationClass::Mixed: return "mixed";
    case VariationClass::Flat: return "flat";
  }
  return "?";
}

VariationClass classify(double a, double b, const ClassThresholds& t) {
  double da = std::abs(a - 1.0);
  double ab = std::abs(b);
  if (da < t.multiplicative_slack) {
    return ab < t.additive_units ? VariationClass::Flat : VariationClass::Additive;
  }
  if (da > t.multiplicative_slack && ab < t.additive_units) return VariationClass::Multiplicative;
  return VariationClass::Mixed;
}

VariationModel fit_variation_model(const std::string& domain, const std::string& location,
                                   const std::vector<PricePair>& pairs, const ClassThresholds& t) {
  if (pairs.size() < 5) {
    throw InsufficientPairs(domain + "/" + location + ": " + std::to_string(pairs.size()) +
                            " pairs, at least 5 needed");
  }
  Rational n(static_cast<long long>(pairs.size()));
  Rational sx, sy, sxx, sxy;
  for (const auto& pr : pairs) {
    if (pr.p_min <= 0) throw InvalidArgument("minimum prices must be positive");
    sx += pr.p_min;
    sy += pr.p_loc;
    sxx += pr.p_min * pr.p_min;
    sxy += pr.p_min * pr.p_loc;
  }

  VariationModel m;
  m.domain = domain;
  m.location = location;
  m.n_pairs = pairs.size();
  Rational spread = n * sxx - sx * sx;
  if (spread == 0) {
    Rational ratios;
    for (const auto& pr : pairs) ratios += pr.p_loc / pr.p_min;
    m.a_exact = ratios / n;
    m.b_exact = 0;
    m.degenerate_spread = true;
  } else {
    m.a_exact = (n * sxy - sx * sy) / spread;
    m.b_exact = (sy - m.a_exact * sx) / n;
  }
  m.a = to_double(m.a_exact);
  m.b = to_double(m.b_exact);

  double sum_sq = 0.0;
  for (const auto& pr : pairs) {
    double rel = to_double((m.a_exact * pr.p_min + m.b_exact - pr.p_loc) / pr.p_loc);
    sum_sq += rel * rel;
  }
  m.residual = std::sqrt(sum_sq / static_cast<double>(pairs.size()));
  m.cls = m.degenerate_spread ? VariationClass::Mixed : classify(m.a, m.b, t);
  return m;
}

std::vector<PricePair> location_pairs(const std::vector<ProductProfile>& profiles, const std::string& location) {
  std::vector<PricePair> pairs;
  for (const auto& p : profiles) {
    if (const fx::RefInterval* at = p.interval_at(location)) {
      pairs.push_back({p.min_price.midpoint(), at->midpoint()});
    }
  }
  return pairs;
}

}  // namespace sheriff::analytics
