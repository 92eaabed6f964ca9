#include "sheriff/analytics/profile.hpp"

#include <algorithm>

namespace sheriff::analytics {

const fx::RefInterval* ProductProfile::interval_at(std::string_view vantage) const {
  for (std::size_t i = 0; i < observations.size(); ++i) {
    if (observations[i].vantage == vantage) return &intervals[i];
  }
  return nullptr;
}

std::string wave_id(const PriceObservation& obs) {
  std::string id = obs.check_id + "#" + std::to_string(obs.repetition);
  if (!obs.persona.empty()) id += "@" + obs.persona;
  return id;
}

ProductProfile product_profile(std::vector<PriceObservation> observations, const fx::RateTable& table) {
  if (observations.size() < 2) {
    throw fx::InsufficientObservations("a product profile needs at least two observations");
  }
  auto earliest = std::min_element(observations.begin(), observations.end(), [](const auto& a, const auto& b) {
    return a.fetched_at < b.fetched_at;
  });
  Date day = utc_day(earliest->fetched_at);

  ProductProfile p;
  p.product_uri = observations.front().product_uri;
  p.domain = observations.front().domain;
  p.wave_id = wave_id(observations.front());
  p.intervals.reserve(observations.size());
  for (const auto& obs : observations) p.intervals.push_back(fx::to_reference_interval(obs.money, table, day));
  p.observations = std::move(observations);

  for (std::size_t i = 1; i < p.intervals.size(); ++i) {
    if (p.intervals[i].midpoint() < p.intervals[p.min_index].midpoint()) p.min_index = i;
  }
  p.min_price = p.intervals[p.min_index];
  p.gate = fx::currency_gate(p.intervals);
  for (const auto& high : p.intervals) {
    for (const auto& low : p.intervals) {
      if (fx::genuinely_above(high, low)) p.max_min_ratio = std::max(p.max_min_ratio, Rational(high.lo / low.hi));
    }
  }
  return p;
}

ProfileBuilder::ProfileBuilder(const fx::RateTable& table, Sink sink) : table_(table), sink_(std::move(sink)) {}

void ProfileBuilder::add(PriceObservation obs) {
  if (obs.check_id != current_check_) {
    flush();
    current_check_ = obs.check_id;
  }
  groups_[{obs.repetition, obs.persona}].push_back(std::move(obs));
}

void ProfileBuilder::finish() { flush(); }

void ProfileBuilder::flush() {
  for (auto& [key, group] : groups_) {
    std::string label = current_check_ + "#" + std::to_string(std::get<0>(key));
    try {
      sink_(product_profile(std::move(group), table_));
    } catch (const fx::InsufficientObservations&) {
      ++skipped_;
      reasons_.push_back(label + ": fewer than two observations");
    } catch (const fx::MissingRate& e) {
      ++skipped_;
      reasons_.push_back(label + ": " + e.what());
    }
  }
  groups_.clear();
}

std::vector<ProductProfile> build_profiles(std::vector<PriceObservation> observations, const fx::RateTable& table,
                                           std::size_t* skipped) {
  std::stable_sort(observations.begin(), observations.end(),
                   [](const auto& a, const auto& b) { return a.check_id < b.check_id; });
  std::vector<ProductProfile> profiles;
  ProfileBuilder builder(table, [&](ProductProfile p) { profiles.push_back(std::move(p)); });
  for (auto& obs : observations) builder.add(std::move(obs));
  builder.finish();
  if (skipped) *skipped = builder.skipped_groups();
  return profiles;
}

}  // namespace sheriff::analytics
