#include "sheriff/core/uri.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace sheriff {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

int default_port(std::string_view scheme) { return scheme == "https" ? 443 : 80; }

// Second-level public suffixes commonly seen on retailer hosts.
constexpr std::array<std::string_view, 16> kMultiLabelSuffixes = {
    "co.uk", "org.uk", "ac.uk", "com.br", "net.br", "com.au", "net.au", "co.jp",
    "co.nz", "com.mx", "com.ar", "co.in", "com.cn", "com.tr", "co.za", "com.sg"};

bool is_ip_literal(std::string_view host) {
  if (host.find(':') != std::string_view::npos) return true;
  return std::all_of(host.begin(), host.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; });
}

}  // namespace

std::string Uri::origin() const {
  std::string out = scheme + "://" + host;
  if (port != default_port(scheme)) out += ":" + std::to_string(port);
  return out;
}

std::string Uri::to_string() const { return origin() + target; }

Uri parse_uri(std::string_view text) {
  auto sep = text.find("://");
  if (sep == std::string_view::npos) throw InvalidUri("not an absolute URI: '" + std::string(text) + "'");
  Uri uri;
  uri.scheme = lower(text.substr(0, sep));
  if (uri.scheme != "http" && uri.scheme != "https") {
    throw InvalidUri("unsupported scheme '" + uri.scheme + "' in '" + std::string(text) + "'");
  }
  std::string_view rest = text.substr(sep + 3);
  auto path_start = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, path_start);
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
  std::string_view host = authority;
  uri.port = default_port(uri.scheme);
  if (!authority.empty() && authority.front() == '[') {
    auto close = authority.find(']');
    if (close == std::string_view::npos) throw InvalidUri("bad IPv6 literal in '" + std::string(text) + "'");
    host = authority.substr(0, close + 1);
    authority = authority.substr(close + 1);
    if (!authority.empty() && authority.front() == ':') authority.remove_prefix(1);
    else authority = {};
  } else if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    authority = authority.substr(colon + 1);
  } else {
    authority = {};
  }
  if (!authority.empty()) {
    int port = 0;
    auto [ptr, ec] = std::from_chars(authority.data(), authority.data() + authority.size(), port);
    if (ec != std::errc() || ptr != authority.data() + authority.size() || port <= 0 || port > 65535) {
      throw InvalidUri("bad port in '" + std::string(text) + "'");
    }
    uri.port = port;
  }
  if (host.empty()) throw InvalidUri("missing host in '" + std::string(text) + "'");
  uri.host = lower(host);
  std::string target = path_start == std::string_view::npos ? "" : std::string(rest.substr(path_start));
  if (auto hash = target.find('#'); hash != std::string::npos) target.resize(hash);
  if (target.empty() || target.front() != '/') target.insert(0, "/");
  uri.target = target;
  return uri;
}

std::string resolve_reference(const Uri& base, std::string_view href) {
  if (href.find("://") != std::string_view::npos) return std::string(href);
  if (href.substr(0, 2) == "//") return base.scheme + ":" + std::string(href);
  if (!href.empty() && href.front() == '/') return base.origin() + std::string(href);
  std::string dir = base.target.substr(0, base.target.find('?'));
  dir = dir.substr(0, dir.rfind('/') + 1);
  return base.origin() + dir + std::string(href);
}

std::string registrable_domain(std::string_view host_in) {
  std::string host = lower(host_in);
  if (auto colon = host.rfind(':'); colon != std::string::npos && host.find(']') == std::string::npos &&
                                    host.find(':') == colon) {
    host.resize(colon);
  }
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (is_ip_literal(host)) return host;
  auto last = host.rfind('.');
  if (last == std::string::npos) return host;
  auto second = host.rfind('.', last - 1);
  if (second == std::string::npos) return host;
  std::string_view tail = std::string_view(host).substr(second + 1);
  bool multi = std::find(kMultiLabelSuffixes.begin(), kMultiLabelSuffixes.end(), tail) !=
               kMultiLabelSuffixes.end();
  if (!multi) return host.substr(second + 1);
  auto third = host.rfind('.', second - 1);
  return third == std::string::npos ? host : host.substr(third + 1);
}

}  // namespace sheriff
