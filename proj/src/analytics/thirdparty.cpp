#include "sheriff/analytics/thirdparty.hpp"

#include "sheriff/core/uri.hpp"
#include "sheriff/extract/html.hpp"

#include <algorithm>

namespace sheriff::analytics {

namespace {

std::string host_of(std::string_view ref) {
  std::size_t start;
  if (ref.rfind("//", 0) == 0) {
    start = 2;
  } else if (ref.rfind("http://", 0) == 0) {
    start = 7;
  } else if (ref.rfind("https://", 0) == 0) {
    start = 8;
  } else {
    return {};
  }
  std::size_t end = ref.find_first_of("/?#", start);
  std::string host(ref.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
  if (auto at = host.rfind('@'); at != std::string::npos) host.erase(0, at + 1);
  std::transform(host.begin(), host.end(), host.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return host;
}

}  // namespace

std::set<std::string> external_hosts(const std::string& html) {
  std::set<std::string> hosts;
  auto doc = extract::Document::parse(html);
  extract::for_each_node(doc.root(), [&](const extract::Node& node) {
    if (!node.is_element("script") && !node.is_element("img") && !node.is_element("iframe")) return;
    if (auto src = node.attribute("src")) {
      std::string host = host_of(*src);
      if (!host.empty()) hosts.insert(std::move(host));
    }
  });
  return hosts;
}

std::vector<ThirdPartyPresence> third_party_scan(const std::map<std::string, std::vector<std::string>>& snapshots) {
  std::map<std::string, std::size_t> present;
  for (const auto& [retailer, pages] : snapshots) {
    std::string own = registrable_domain(retailer);
    std::set<std::string> parties;
    for (const auto& page : pages) {
      for (const auto& host : external_hosts(page)) {
        std::string party = registrable_domain(host);
        if (party != own) parties.insert(party);
      }
    }
    for (const auto& party : parties) ++present[party];
  }
  std::vector<ThirdPartyPresence> out;
  for (const auto& [party, count] : present) {
    out.push_back({party, count, static_cast<double>(count) / static_cast<double>(snapshots.size())});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.fraction > b.fraction; });
  return out;
}

}  // namespace sheriff::analytics
