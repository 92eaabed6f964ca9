#include "sheriff/fx/gate.hpp"

#include <algorithm>

namespace sheriff::fx {

Rational equality_tolerance() { return Rational(5, 1000); }

bool genuinely_above(const RefInterval& higher, const RefInterval& lower) {
  return higher.lo - lower.hi > equality_tolerance();
}

GateVerdict currency_gate(std::span<const RefInterval> intervals) {
  if (intervals.size() < 2) throw InsufficientObservations("the currency gate needs at least two prices");
  const Rational tol = equality_tolerance();

  // Report the genuine pair with the largest pessimistic ratio, or failing
  // that the pair with the largest midpoint ratio.
  std::optional<std::pair<std::size_t, std::size_t>> best_genuine;
  Rational best_pessimistic;
  std::pair<std::size_t, std::size_t> best_naive{0, 1};
  Rational best_naive_ratio = -1;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    for (std::size_t j = 0; j < intervals.size(); ++j) {
      if (i == j) continue;
      const auto& hi = intervals[i];
      const auto& lo = intervals[j];
      if (genuinely_above(hi, lo)) {
        Rational pessimistic = hi.lo / lo.hi;
        if (!best_genuine || pessimistic > best_pessimistic) {
          best_genuine = {i, j};
          best_pessimistic = pessimistic;
        }
      }
      Rational naive = hi.midpoint() / lo.midpoint();
      if (naive > best_naive_ratio) {
        best_naive_ratio = naive;
        best_naive = {i, j};
      }
    }
  }
  auto [i, j] = best_genuine ? *best_genuine : best_naive;
  const auto& higher = intervals[i];
  const auto& lower = intervals[j];
  GateVerdict v;
  v.passed = best_genuine.has_value();
  v.observed_gap = higher.midpoint() / lower.midpoint();
  v.max_currency_gap = (higher.midpoint() / higher.lo) * ((lower.hi + tol) / lower.midpoint());
  return v;
}

GateVerdict currency_gate(std::span<const PriceObservation> observations, const RateTable& table) {
  if (observations.size() < 2) throw InsufficientObservations("the currency gate needs at least two observations");
  auto earliest = std::min_element(observations.begin(), observations.end(), [](const auto& a, const auto& b) {
                    return a.fetched_at < b.fetched_at;
                  })->fetched_at;
  Date day = utc_day(earliest);
  std::vector<RefInterval> intervals;
  intervals.reserve(observations.size());
  for (const auto& obs : observations) intervals.push_back(to_reference_interval(obs.money, table, day));
  return currency_gate(intervals);
}

}  // namespace sheriff::fx
