#include "sheriff/sim/fleet.hpp"

#include "sheriff/sim/pages.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

namespace sheriff::sim {

namespace {

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return text;
}

std::string trim(std::string_view text) {
  std::size_t b = text.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  std::size_t e = text.find_last_not_of(" \t");
  return std::string(text.substr(b, e - b + 1));
}

std::map<std::string, std::string> parse_cookies(const std::string& header) {
  std::map<std::string, std::string> cookies;
  std::size_t pos = 0;
  while (pos <= header.size()) {
    std::size_t end = header.find(';', pos);
    if (end == std::string::npos) end = header.size();
    std::string pair = trim(std::string_view(header).substr(pos, end - pos));
    std::size_t eq = pair.find('=');
    if (eq != std::string::npos) cookies.emplace(trim(pair.substr(0, eq)), trim(pair.substr(eq + 1)));
    pos = end + 1;
  }
  return cookies;
}

std::vector<std::size_t> recommendation_indices(std::size_t self, std::size_t n) {
  std::vector<std::size_t> picks;
  for (std::size_t step : {1, 7, 13}) {
    std::size_t idx = (self + step) % n;
    if (idx != self && std::find(picks.begin(), picks.end(), idx) == picks.end()) picks.push_back(idx);
  }
  return picks;
}

}  // namespace

struct SimFleet::SharedState {
  mutable std::mutex mu;
  std::map<std::string, AbArm> sessions;
  std::deque<RecordedRequest> log;
  std::size_t log_capacity = 0;
  std::atomic<std::uint64_t> next_session{1};

  void record(RecordedRequest r) {
    std::lock_guard lock(mu);
    if (log_capacity == 0) return;
    if (log.size() == log_capacity) log.pop_front();
    log.push_back(std::move(r));
  }

  AbArm arm_for(const PricingPolicy& policy, const std::string& session) {
    std::lock_guard lock(mu);
    auto key = policy.domain + "|" + session;
    auto it = sessions.find(key);
    if (it != sessions.end()) return it->second;
    AbArm arm = ab_arm(policy, session);
    sessions.emplace(std::move(key), arm);
    return arm;
  }
};

struct SimFleet::Endpoint {
  const PricingPolicy* policy = nullptr;
  std::unique_ptr<httplib::Server> server;
  std::thread thread;
  int port = 0;
};

SimFleet::SimFleet(std::vector<PricingPolicy> policies, FleetOptions options)
    : policies_(std::move(policies)), options_(std::move(options)), state_(std::make_shared<SharedState>()) {
  state_->log_capacity = options_.request_log_capacity;
  std::set<std::string> domains;
  for (const auto& p : policies_) {
    p.validate();
    if (!domains.insert(p.domain).second) throw InvalidPolicy("duplicate domain '" + p.domain + "'");
  }
}

SimFleet::~SimFleet() { stop(); }

void SimFleet::start() {
  if (!endpoints_.empty()) return;
  for (std::size_t i = 0; i < policies_.size(); ++i) {
    auto ep = std::make_unique<Endpoint>();
    ep->policy = &policies_[i];
    ep->server = std::make_unique<httplib::Server>();
    // httplib defaults to SO_REUSEPORT, which would let two fleets share a port.
    ep->server->set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    const PricingPolicy& policy = policies_[i];
    auto state = state_;

    ep->server->set_pre_routing_handler([state, &policy](const httplib::Request& req, httplib::Response&) {
      RecordedRequest r;
      r.domain = policy.domain;
      r.path = req.target;
      r.remote_address = req.remote_addr;
      for (const auto& [name, value] : req.headers) {
        if (name == "REMOTE_ADDR" || name == "REMOTE_PORT" || name == "LOCAL_ADDR" || name == "LOCAL_PORT") {
          continue;
        }
        r.headers[lower(name)] = value;
      }
      state->record(std::move(r));
      return httplib::Server::HandlerResponse::Unhandled;
    });

    ep->server->Get(R"(/product/([A-Za-z0-9_.-]+))", [state, &policy](const httplib::Request& req,
                                                                     httplib::Response& res) {
      RequestProfile profile;
      for (const auto& [name, value] : req.headers) profile.headers[lower(name)] = value;
      if (req.has_header("Cookie")) profile.cookies = parse_cookies(req.get_header_value("Cookie"));
      auto sid = profile.cookies.find(kSessionCookie);
      if (sid != profile.cookies.end() && !sid->second.empty()) {
        profile.session_id = sid->second;
      } else {
        profile.session_id = "s" + std::to_string(state->next_session.fetch_add(1));
        res.set_header("Set-Cookie", std::string(kSessionCookie) + "=" + profile.session_id + "; Path=/");
      }
      state->arm_for(policy, profile.session_id);

      std::optional<std::string> region_header;
      if (req.has_header(kRegionHeader)) region_header = req.get_header_value(kRegionHeader);
      try {
        std::string region = resolve_region(policy, region_header, req.remote_addr);
        const std::string id = req.matches[1];
        const CatalogItem& item = policy.product(id);
        Money price = price_for(policy, id, region, profile);
        std::size_t self = static_cast<std::size_t>(&item - policy.catalog.data());
        std::vector<Recommendation> recs;
        for (std::size_t idx : recommendation_indices(self, policy.catalog.size())) {
          const CatalogItem& other = policy.catalog[idx];
          recs.push_back({other.id, other.name, price_for(policy, other.id, region, profile)});
        }
        res.set_content(render_product_page(policy, item, price, recs), "text/html; charset=utf-8");
      } catch (const UnknownProduct& e) {
        res.status = 404;
        res.set_content(e.what(), "text/plain");
      } catch (const UnknownRegion& e) {
        res.status = 400;
        res.set_content(e.what(), "text/plain");
      }
    });

    ep->server->Get("/catalog", [&policy](const httplib::Request& req, httplib::Response& res) {
      int page = 1;
      if (req.has_param("page")) {
        try {
          page = std::stoi(req.get_param_value("page"));
        } catch (const std::exception&) {
          res.status = 400;
          return;
        }
      }
      if (page < 1 || page > listing_page_count(policy)) {
        res.status = 404;
        return;
      }
      res.set_content(render_listing_page(policy, page), "text/html; charset=utf-8");
    });

    ep->server->Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });

    if (options_.base_port == 0) {
      ep->port = ep->server->bind_to_any_port(options_.bind_address);
      if (ep->port <= 0) {
        stop();
        throw BindFailure("cannot bind an ephemeral port for " + policy.domain);
      }
    } else {
      ep->port = options_.base_port + static_cast<int>(i);
      if (!ep->server->bind_to_port(options_.bind_address, ep->port)) {
        stop();
        throw BindFailure("cannot bind " + options_.bind_address + ":" + std::to_string(ep->port) + " for " +
                          policy.domain);
      }
    }
    httplib::Server* server = ep->server.get();
    ep->thread = std::thread([server] { server->listen_after_bind(); });
    endpoints_.push_back(std::move(ep));
  }
  for (const auto& ep : endpoints_) ep->server->wait_until_ready();
}

void SimFleet::stop() {
  for (auto& ep : endpoints_) ep->server->stop();
  for (auto& ep : endpoints_) {
    if (ep->thread.joinable()) ep->thread.join();
  }
  endpoints_.clear();
}

std::size_t SimFleet::size() const { return policies_.size(); }

const PricingPolicy& SimFleet::policy(std::string_view domain) const {
  for (const auto& p : policies_) {
    if (p.domain == domain) return p;
  }
  throw InvalidArgument("unknown sim domain '" + std::string(domain) + "'");
}

int SimFleet::port(std::string_view domain) const {
  for (const auto& ep : endpoints_) {
    if (ep->policy->domain == domain) return ep->port;
  }
  throw InvalidArgument("sim domain '" + std::string(domain) + "' is not serving");
}

std::string SimFleet::origin(std::string_view domain) const {
  return "http://" + std::string(domain) + ":" + std::to_string(port(domain));
}

std::string SimFleet::product_uri(std::string_view domain, std::string_view product_id) const {
  return origin(domain) + "/product/" + std::string(product_id);
}

std::string SimFleet::listing_uri(std::string_view domain, int page) const {
  return origin(domain) + "/catalog?page=" + std::to_string(page);
}

std::map<std::string, std::string> SimFleet::host_map() const {
  std::string address = options_.bind_address == "0.0.0.0" ? "127.0.0.1" : options_.bind_address;
  std::map<std::string, std::string> map;
  for (const auto& p : policies_) map[p.domain] = address;
  return map;
}

std::vector<RecordedRequest> SimFleet::requests() const {
  std::lock_guard lock(state_->mu);
  return {state_->log.begin(), state_->log.end()};
}

void SimFleet::clear_requests() {
  std::lock_guard lock(state_->mu);
  state_->log.clear();
}

}  // namespace sheriff::sim
