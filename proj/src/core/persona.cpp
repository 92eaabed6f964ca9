#include "sheriff/core/persona.hpp"

#include <algorithm>
#include <set>

namespace sheriff {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

nlohmann::json pairs_to_json(const std::vector<std::pair<std::string, std::string>>& pairs, bool redact) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [name, value] : pairs) out.push_back({name, redact ? std::string("<redacted>") : value});
  return out;
}

std::vector<std::pair<std::string, std::string>> pairs_from_json(const nlohmann::json& j) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& entry : j) {
    if (entry.is_array() && entry.size() == 2) {
      out.emplace_back(entry[0].get<std::string>(), entry[1].get<std::string>());
    } else if (entry.is_object()) {
      out.emplace_back(entry.at("name").get<std::string>(), entry.at("value").get<std::string>());
    } else {
      throw InvalidArgument("persona entries must be [name, value] pairs");
    }
  }
  return out;
}

}  // namespace

void PersonaProfile::validate() const {
  std::set<std::string> seen;
  for (const auto& [name, value] : headers) {
    if (name.empty()) throw InvalidArgument("persona '" + this->name + "' has an empty header name");
    if (!seen.insert(lower(name)).second) {
      throw InvalidArgument("persona '" + this->name + "' repeats header '" + name + "'");
    }
  }
}

std::string PersonaProfile::cookie_header() const {
  std::string out;
  for (const auto& [name, value] : cookies) {
    if (!out.empty()) out += "; ";
    out += name + "=" + value;
  }
  return out;
}

nlohmann::json to_json(const PersonaProfile& p) {
  nlohmann::json j = {{"name", p.name}, {"headers", pairs_to_json(p.headers, false)},
                      {"cookies", pairs_to_json(p.cookies, false)}};
  if (p.logged_in_as) j["logged_in_as"] = *p.logged_in_as;
  return j;
}

nlohmann::json to_redacted_json(const PersonaProfile& p) {
  nlohmann::json j = to_json(p);
  j["cookies"] = pairs_to_json(p.cookies, true);
  return j;
}

PersonaProfile persona_from_json(const nlohmann::json& j) {
  PersonaProfile p;
  try {
    p.name = j.value("name", std::string());
    if (j.contains("headers")) p.headers = pairs_from_json(j.at("headers"));
    if (j.contains("cookies")) p.cookies = pairs_from_json(j.at("cookies"));
    if (j.contains("logged_in_as") && !j.at("logged_in_as").is_null()) {
      p.logged_in_as = j.at("logged_in_as").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed persona: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace sheriff
