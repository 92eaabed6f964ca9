#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace sheriff::analytics {

// Hosts referenced by script, img and iframe src attributes. Relative
// references are skipped.
std::set<std::string> external_hosts(const std::string& html);

struct ThirdPartyPresence {
  std::string party;  // registrable domain
  std::size_t retailers = 0;
  double fraction = 0.0;
};

// snapshots: retailer domain -> page bodies. A host is third party when its
// registrable domain differs from the retailer's. Sorted by fraction, then
// party.
std::vector<ThirdPartyPresence> third_party_scan(const std::map<std::string, std::vector<std::string>>& snapshots);

}  // namespace sheriff::analytics
