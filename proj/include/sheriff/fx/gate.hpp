#pragma once

#include "sheriff/core/observation.hpp"
#include "sheriff/fx/interval.hpp"

#include <span>
#include <vector>

namespace sheriff::fx {

class InsufficientObservations : public Error {
 public:
  using Error::Error;
};

// Reference-unit slack under which two prices count as equal (half a cent).
Rational equality_tolerance();

// For the pair reported, `observed_gap` is the ratio of interval midpoints
// and `max_currency_gap` the largest ratio exchange-rate movement inside
// the windows could explain (plus the equality tolerance). They satisfy
// passed <=> observed_gap > max_currency_gap.
struct GateVerdict {
  bool passed = false;
  Rational observed_gap{1};
  Rational max_currency_gap{1};
};

// True when `higher` is above `lower` by more than currency conversion and
// display rounding can explain: higher.lo - lower.hi > tolerance.
bool genuinely_above(const RefInterval& higher, const RefInterval& lower);

GateVerdict currency_gate(std::span<const RefInterval> intervals);

// Converts each observation at the UTC day of the earliest fetch and gates
// the set. Requires at least two observations; throws MissingRate.
GateVerdict currency_gate(std::span<const PriceObservation> observations, const RateTable& table);

}  // namespace sheriff::fx
