#include "sheriff/analytics/persona.hpp"

#include "sheriff/analytics/profile.hpp"
#include "sheriff/extract/price_parser.hpp"
#include "sheriff/fx/gate.hpp"
#include "sheriff/fx/interval.hpp"

#include <algorithm>
#include <map>

namespace sheriff::analytics {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::map<std::string, std::string> as_map(const std::vector<std::pair<std::string, std::string>>& pairs,
                                          bool fold_case) {
  std::map<std::string, std::string> m;
  for (const auto& [k, v] : pairs) m[fold_case ? lower(k) : k] = v;
  return m;
}

void diff_maps(const std::map<std::string, std::string>& a, const std::map<std::string, std::string>& b,
               const std::string& prefix, std::vector<std::string>& out) {
  std::map<std::string, bool> names;
  for (const auto& [k, v] : a) names[k] = true;
  for (const auto& [k, v] : b) names[k] = true;
  for (const auto& [name, unused] : names) {
    auto ia = a.find(name);
    auto ib = b.find(name);
    bool same = ia != a.end() && ib != b.end() && ia->second == ib->second;
    if (!same) out.push_back(prefix + name);
  }
}

}  // namespace

std::vector<std::string> differing_fields(const PersonaProfile& a, const PersonaProfile& b) {
  std::vector<std::string> out;
  diff_maps(as_map(a.cookies, false), as_map(b.cookies, false), "cookie:", out);
  diff_maps(as_map(a.headers, true), as_map(b.headers, true), "header:", out);
  return out;
}

PersonaReport persona_compare(const std::vector<PriceObservation>& observations,
                              const std::vector<PersonaProfile>& profiles, const fx::RateTable& table) {
  PersonaReport report;
  if (observations.empty()) throw QuorumFailure("no persona observations");
  report.product_uri = observations.front().product_uri;
  report.vantage = observations.front().vantage;
  report.wave_id = observations.front().check_id + "#" + std::to_string(observations.front().repetition);

  std::map<std::string, const PriceObservation*> by_persona;
  for (const auto& obs : observations) {
    if (obs.vantage != report.vantage) throw InvalidArgument("persona comparison mixes vantages");
    if (obs.product_uri != report.product_uri) throw InvalidArgument("persona comparison mixes products");
    if (obs.check_id + "#" + std::to_string(obs.repetition) != report.wave_id) {
      throw InvalidArgument("persona comparison mixes waves");
    }
    by_persona.emplace(obs.persona, &obs);
  }
  if (by_persona.size() < 2) throw QuorumFailure("persona comparison needs prices for two personas");

  auto earliest = std::min_element(observations.begin(), observations.end(),
                                   [](const auto& a, const auto& b) { return a.fetched_at < b.fetched_at; });
  Date day = utc_day(earliest->fetched_at);

  std::map<std::string, const PersonaProfile*> profile_of;
  for (const auto& p : profiles) profile_of[p.name] = &p;
  static const PersonaProfile kEmpty;

  std::vector<std::pair<std::string, fx::RefInterval>> intervals;
  for (const auto& [name, obs] : by_persona) {
    report.prices.push_back({name, obs->money, extract::canonical_format(obs->money)});
    intervals.emplace_back(name, fx::to_reference_interval(obs->money, table, day));
  }
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    for (std::size_t j = i + 1; j < intervals.size(); ++j) {
      const auto& [na, ia] = intervals[i];
      const auto& [nb, ib] = intervals[j];
      bool a_above = fx::genuinely_above(ia, ib);
      bool b_above = fx::genuinely_above(ib, ia);
      if (!a_above && !b_above) continue;
      PersonaDifference d;
      d.a = na;
      d.b = nb;
      d.ratio = a_above ? ia.lo / ib.hi : ib.lo / ia.hi;
      auto pa = profile_of.find(na);
      auto pb = profile_of.find(nb);
      d.fields = differing_fields(pa == profile_of.end() ? kEmpty : *pa->second,
                                  pb == profile_of.end() ? kEmpty : *pb->second);
      report.differences.push_back(std::move(d));
    }
  }
  return report;
}

}  // namespace sheriff::analytics
