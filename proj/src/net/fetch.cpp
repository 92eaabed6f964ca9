#include "sheriff/net/fetch.hpp"

#include "sheriff/core/uri.hpp"

#include <httplib.h>

namespace sheriff::net {

FetchResult agent_fetch(const std::string& uri, const extract::PriceSelector& selector,
                        const std::optional<PersonaProfile>& profile, const FetchOptions& options) {
  FetchResult result;
  result.started_at = now();
  auto t0 = std::chrono::steady_clock::now();
  auto finish = [&] {
    result.latency = std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - t0);
    return result;
  };

  Uri target;
  try {
    target = parse_uri(uri);
  } catch (const InvalidUri& e) {
    result.error = e.what();
    return finish();
  }

  httplib::Client client(target.origin());
  auto secs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout);
  client.set_connection_timeout(secs);
  client.set_read_timeout(secs);
  client.set_write_timeout(secs);
  client.set_keep_alive(false);
  client.set_follow_location(true);
  if (!options.resolve.empty()) client.set_hostname_addr_map(options.resolve);

  httplib::Headers headers;
  if (profile) {
    for (const auto& [name, value] : profile->headers) headers.emplace(name, value);
    std::string cookies = profile->cookie_header();
    if (!cookies.empty()) headers.emplace("Cookie", cookies);
  }
  for (const auto& [name, value] : options.extra_headers) headers.emplace(name, value);

  auto res = client.Get(target.target, headers);
  if (!res) {
    result.error = httplib::to_string(res.error());
    return finish();
  }
  result.http_status = res->status;
  if (res->status < 200 || res->status >= 300) {
    result.status = FetchStatus::HttpError;
    result.error = "HTTP " + std::to_string(res->status);
    return finish();
  }
  result.page = std::move(res->body);
  try {
    extract::apply_selector(*result.page, selector);
    result.status = FetchStatus::Ok;
  } catch (const Error& e) {
    result.status = FetchStatus::SelectorMiss;
    result.error = e.what();
  }
  return finish();
}

}  // namespace sheriff::net
