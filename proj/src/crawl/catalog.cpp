#include "sheriff/crawl/catalog.hpp"

#include "sheriff/core/uri.hpp"
#include "sheriff/extract/html.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <random>
#include <regex>
#include <set>

namespace sheriff::crawl {

std::string selector_to_text(const extract::PriceSelector& sel) {
  return (sel.kind == extract::PriceSelector::Kind::DomPath ? "dom:" : "anchor:") + sel.expression;
}

extract::PriceSelector selector_from_text(std::string_view text) {
  extract::PriceSelector sel;
  if (text.starts_with("anchor:")) {
    sel.kind = extract::PriceSelector::Kind::TextAnchor;
    sel.expression = std::string(text.substr(7));
  } else {
    sel.kind = extract::PriceSelector::Kind::DomPath;
    sel.expression = std::string(text.starts_with("dom:") ? text.substr(4) : text);
  }
  sel.validate();
  return sel;
}

std::vector<CatalogEntry> read_catalog(std::istream& in) {
  std::vector<CatalogEntry> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InvalidArgument("catalog line " + std::to_string(number) + " has no tab");
    }
    std::string uri = line.substr(0, tab);
    parse_uri(uri);
    out.push_back({uri, selector_from_text(line.substr(tab + 1))});
  }
  return out;
}

std::vector<CatalogEntry> read_catalog_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open catalog " + path);
  return read_catalog(in);
}

void write_catalog(std::ostream& out, const std::vector<CatalogEntry>& catalog) {
  for (const auto& e : catalog) out << e.uri << '\t' << selector_to_text(e.selector) << '\n';
}

std::vector<CatalogEntry> sample_products(const std::vector<CatalogEntry>& catalog, int cap, std::uint64_t seed) {
  if (catalog.empty()) throw EmptyCatalog("catalog is empty");
  if (cap < 1) throw InvalidArgument("cap must be at least 1");
  std::vector<CatalogEntry> out;
  std::mt19937_64 rng(seed);
  std::sample(catalog.begin(), catalog.end(), std::back_inserter(out), cap, rng);
  return out;
}

std::vector<CatalogEntry> catalog_ingest(const std::vector<std::pair<std::string, std::string>>& listing_pages,
                                         const std::string& link_pattern, const extract::PriceSelector& selector) {
  std::regex pattern(link_pattern);
  std::vector<CatalogEntry> out;
  std::set<std::string> seen;
  for (const auto& [page_uri, markup] : listing_pages) {
    Uri base = parse_uri(page_uri);
    auto doc = extract::Document::parse(markup);
    extract::for_each_node(doc.root(), [&](const extract::Node& node) {
      if (!node.is_element("a")) return;
      const std::string* href = node.attribute("href");
      if (!href) return;
      std::string uri;
      try {
        uri = resolve_reference(base, *href);
      } catch (const Error&) {
        return;
      }
      if (!std::regex_match(uri, pattern) || !seen.insert(uri).second) return;
      out.push_back({uri, selector});
    });
  }
  if (out.empty()) throw NoMatches("no links match " + link_pattern);
  return out;
}

}  // namespace sheriff::crawl
