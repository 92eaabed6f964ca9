#pragma once

#include "sheriff/core/errors.hpp"
#include "sheriff/core/rational.hpp"

#include <vector>

namespace sheriff::analytics {

// Linear interpolation between closest ranks: h = (n - 1) p,
// q = x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h]).
// Throws InvalidArgument on an empty sample or p outside [0, 1].
Rational quantile(std::vector<Rational> values, const Rational& p);

struct RatioStats {
  Rational min{1};
  Rational q25{1};
  Rational median{1};
  Rational q75{1};
  Rational max{1};
};

// All five statistics from one pass of selections. Empty input yields all 1.
RatioStats ratio_stats(std::vector<Rational> values);

}  // namespace sheriff::analytics
