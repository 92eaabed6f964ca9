#pragma once

#include "sheriff/core/observation.hpp"
#include "sheriff/core/persona.hpp"
#include "sheriff/fx/rate_table.hpp"

#include <string>
#include <vector>

namespace sheriff::analytics {

struct PersonaPrice {
  std::string persona;
  Money money;
  std::string canonical;
};

struct PersonaDifference {
  std::string a;
  std::string b;
  Rational ratio{1};  // higher over lower
  // Profile fields that differ: "cookie:<name>", "header:<name>".
  std::vector<std::string> fields;
};

struct PersonaReport {
  std::string product_uri;
  std::string vantage;
  std::string wave_id;
  std::vector<PersonaPrice> prices;
  std::vector<PersonaDifference> differences;
  bool any_difference() const { return !differences.empty(); }
};

// Observations of one product from one vantage in one wave, tagged with
// the persona name. Throws QuorumFailure when fewer than two personas have
// a price, InvalidArgument when vantages or waves are mixed.
PersonaReport persona_compare(const std::vector<PriceObservation>& observations,
                              const std::vector<PersonaProfile>& profiles, const fx::RateTable& table);

// Names of profile fields (headers case-insensitive) whose values differ.
std::vector<std::string> differing_fields(const PersonaProfile& a, const PersonaProfile& b);

}  // namespace sheriff::analytics
