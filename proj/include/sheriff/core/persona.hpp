#pragma once

#include "sheriff/core/errors.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sheriff {

// A fetch profile emulating a class of user. Headers and cookies are sent
// verbatim, in order.
struct PersonaProfile {
  std::string name;
  std::vector<std::pair<std::string, std::string>> headers;
  std::vector<std::pair<std::string, std::string>> cookies;
  // Metadata only; never sent.
  std::optional<std::string> logged_in_as;

  // Throws InvalidArgument on duplicate header names (case-insensitive).
  void validate() const;
  // "name=value; name=value", or empty.
  std::string cookie_header() const;
};

nlohmann::json to_json(const PersonaProfile& p);
// Cookie values are replaced by "<redacted>" so reports never carry
// session secrets.
nlohmann::json to_redacted_json(const PersonaProfile& p);
PersonaProfile persona_from_json(const nlohmann::json& j);

}  // namespace sheriff
