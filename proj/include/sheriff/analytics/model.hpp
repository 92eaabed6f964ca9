#pragma once

#include "sheriff/analytics/profile.hpp"
#include "sheriff/core/errors.hpp"
#include "sheriff/core/rational.hpp"

#include <string>
#include <vector>

namespace sheriff::analytics {

class InsufficientPairs : public Error {
 public:
  using Error::Error;
};

enum class VariationClass { Multiplicative, Additive, Mixed, Flat };

std::string to_string(VariationClass c);

struct ClassThresholds {
  double additive_units = 0.5;       // |b| below this counts as no offset
  double multiplicative_slack = 0.01;  // |a - 1| below this counts as no factor
};

struct PricePair {
  Rational p_min;
  Rational p_loc;
};

// p_loc ~ a p_min + b, least squares over exact rationals.
struct VariationModel {
  std::string domain;
  std::string location;
  Rational a_exact{1};
  Rational b_exact{0};
  double a = 1.0;
  double b = 0.0;
  double residual = 0.0;  // RMS relative error
  std::size_t n_pairs = 0;
  VariationClass cls = VariationClass::Flat;
  // All p_min equal: slope undefined, a = mean ratio, b = 0, class mixed.
  bool degenerate_spread = false;
};

VariationClass classify(double a, double b, const ClassThresholds& t = {});

// Throws InsufficientPairs (< 5 pairs) and InvalidArgument (p_min <= 0).
VariationModel fit_variation_model(const std::string& domain, const std::string& location,
                                   const std::vector<PricePair>& pairs, const ClassThresholds& t = {});

// (min price, price at location) midpoints from every profile that
// observed the location.
std::vector<PricePair> location_pairs(const std::vector<ProductProfile>& profiles, const std::string& location);

}  // namespace sheriff::analytics
