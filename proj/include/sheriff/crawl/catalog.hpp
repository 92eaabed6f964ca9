#pragma once

#include "sheriff/core/errors.hpp"
#include "sheriff/extract/selector.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sheriff::crawl {

class EmptyCatalog : public Error {
 public:
  using Error::Error;
};

class NoMatches : public Error {
 public:
  using Error::Error;
};

struct CatalogEntry {
  std::string uri;
  extract::PriceSelector selector;

  friend bool operator==(const CatalogEntry& a, const CatalogEntry& b) {
    return a.uri == b.uri && a.selector == b.selector;
  }
};

// "dom:<path>" or "anchor:<offset>:<text>"; a bare expression is a dom path.
std::string selector_to_text(const extract::PriceSelector& sel);
extract::PriceSelector selector_from_text(std::string_view text);

// One "uri<TAB>selector" per line; blank lines and '#' comments skipped.
std::vector<CatalogEntry> read_catalog(std::istream& in);
std::vector<CatalogEntry> read_catalog_file(const std::string& path);
void write_catalog(std::ostream& out, const std::vector<CatalogEntry>& catalog);

// Uniform sample without replacement of min(cap, |catalog|) entries, in
// catalog order. Deterministic in the seed. Throws EmptyCatalog and
// InvalidArgument for cap < 1.
std::vector<CatalogEntry> sample_products(const std::vector<CatalogEntry>& catalog, int cap, std::uint64_t seed);

// Product links on listing pages, given as (page uri, markup) pairs. Hrefs
// are resolved against their page and matched in full against
// `link_pattern`; every product gets the retailer's selector. Duplicates
// collapse to their first occurrence. Throws NoMatches.
std::vector<CatalogEntry> catalog_ingest(const std::vector<std::pair<std::string, std::string>>& listing_pages,
                                         const std::string& link_pattern, const extract::PriceSelector& selector);

}  // namespace sheriff::crawl
