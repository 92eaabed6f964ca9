#pragma once

#include "sheriff/core/observation.hpp"
#include "sheriff/fx/gate.hpp"
#include "sheriff/fx/interval.hpp"
#include "sheriff/fx/rate_table.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace sheriff::analytics {

// All observations of one product in one wave (check id + repetition +
// persona), converted to reference intervals and gated.
struct ProductProfile {
  std::string product_uri;
  std::string domain;
  std::string wave_id;
  std::vector<PriceObservation> observations;
  std::vector<fx::RefInterval> intervals;  // parallel to observations
  std::size_t min_index = 0;               // lowest interval midpoint
  fx::RefInterval min_price;
  // Pessimistic: max over genuinely-different pairs of lo(high) / hi(low),
  // floored at 1, so gate.passed <=> max_min_ratio > 1.
  Rational max_min_ratio{1};
  fx::GateVerdict gate;

  const fx::RefInterval* interval_at(std::string_view vantage) const;
};

// Throws fx::InsufficientObservations (< 2 observations) and fx::MissingRate.
ProductProfile product_profile(std::vector<PriceObservation> observations, const fx::RateTable& table);

std::string wave_id(const PriceObservation& obs);

// Streams observations into profiles. Observations are grouped by
// (check id, repetition, persona); groups are flushed when the check id
// changes, so input ordered by check id needs memory for one check only.
class ProfileBuilder {
 public:
  using Sink = std::function<void(ProductProfile)>;

  ProfileBuilder(const fx::RateTable& table, Sink sink);

  void add(PriceObservation obs);
  void finish();

  std::size_t skipped_groups() const { return skipped_; }
  const std::vector<std::string>& skip_reasons() const { return reasons_; }

 private:
  void flush();

  const fx::RateTable& table_;
  Sink sink_;
  std::string current_check_;
  std::map<std::tuple<int, std::string>, std::vector<PriceObservation>> groups_;
  std::size_t skipped_ = 0;
  std::vector<std::string> reasons_;
};

std::vector<ProductProfile> build_profiles(std::vector<PriceObservation> observations, const fx::RateTable& table,
                                           std::size_t* skipped = nullptr);

}  // namespace sheriff::analytics
