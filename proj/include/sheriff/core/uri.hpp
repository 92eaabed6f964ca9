#pragma once

#include "sheriff/core/errors.hpp"

#include <string>
#include <string_view>

namespace sheriff {

class InvalidUri : public Error {
 public:
  using Error::Error;
};

struct Uri {
  std::string scheme;  // "http" or "https"
  std::string host;    // lower-cased
  int port = 0;        // explicit or scheme default
  std::string target;  // path plus query, always starts with '/'

  std::string origin() const;  // scheme://host[:port]
  std::string to_string() const;
};

// Only absolute http(s) URIs are accepted.
Uri parse_uri(std::string_view text);

// Resolves an href found on a page against the page's URI.
std::string resolve_reference(const Uri& base, std::string_view href);

// eTLD+1 approximation backed by a short list of multi-label public
// suffixes. IP literals and single-label hosts are returned unchanged.
std::string registrable_domain(std::string_view host);

}  // namespace sheriff
