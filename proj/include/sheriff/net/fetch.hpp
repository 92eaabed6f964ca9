#pragma once

#include "sheriff/core/persona.hpp"
#include "sheriff/core/time.hpp"
#include "sheriff/extract/selector.hpp"
#include "sheriff/net/messages.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sheriff::net {

struct FetchResult {
  std::string vantage;
  FetchStatus status = FetchStatus::Timeout;
  int http_status = 0;
  std::optional<std::string> page;  // present for ok and selector-miss
  Timestamp started_at{};
  Millis latency{0};
  std::string error;
};

struct FetchOptions {
  Millis timeout{20000};
  // Sent after the profile's headers, e.g. a region test header.
  std::vector<std::pair<std::string, std::string>> extra_headers;
  // host -> address overrides for name resolution.
  std::map<std::string, std::string> resolve;
};

// One GET over a fresh connection with the profile's headers and cookies
// applied verbatim. ok requires a 2xx page on which the selector resolves;
// connection failures and deadlines are reported as timeout.
FetchResult agent_fetch(const std::string& uri, const extract::PriceSelector& selector,
                        const std::optional<PersonaProfile>& profile, const FetchOptions& options = {});

}  // namespace sheriff::net
