#include "sheriff/net/api.hpp"

#include "sheriff/core/uri.hpp"
#include "sheriff/extract/price_parser.hpp"
#include "sheriff/extract/selector.hpp"
#include "sheriff/core/rational.hpp"

#include <httplib.h>

namespace sheriff::net {

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

}  // namespace

nlohmann::json check_to_json(const CheckState& state) {
  nlohmann::json prices = nlohmann::json::array();
  for (const auto& p : state.prices) {
    prices.push_back({{"vantage", p.vantage},
                      {"country", p.country},
                      {"city", p.city},
                      {"price", extract::canonical_format(p.money)}});
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : state.failures) failures.push_back({{"vantage", f.vantage}, {"reason", f.reason}});
  nlohmann::json gate = nullptr;
  if (state.gate) {
    gate = {{"passed", state.gate->passed},
            {"observed_gap", format_fixed(state.gate->observed_gap, 6)},
            {"max_currency_gap", format_fixed(state.gate->max_currency_gap, 6)}};
  }
  nlohmann::json j = {{"check_id", state.id},
                      {"status", to_string(state.status)},
                      {"repetitions_done", state.repetitions_done},
                      {"product_uri", state.request.product_uri},
                      {"prices", prices},
                      {"failures", failures},
                      {"gate", gate}};
  if (!state.error.empty()) j["error"] = state.error;
  return j;
}

RequesterApi::RequesterApi(CheckService& service) : service_(service) {}

RequesterApi::~RequesterApi() { stop(); }

void RequesterApi::start(const std::string& address, int port) {
  server_ = std::make_unique<httplib::Server>();
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
  server_->Options(R"(/v1/checks.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server_->Post("/v1/checks", [this](const httplib::Request& req, httplib::Response& res) {
    CheckRequest request;
    try {
      auto body = nlohmann::json::parse(req.body);
      if (!body.is_object()) throw InvalidArgument("body must be a JSON object");
      request.product_uri = body.at("product_uri").get<std::string>();
      const auto& sel = body.at("selector");
      request.selector = sel.is_string() ? extract::PriceSelector::dom_path(sel.get<std::string>())
                                         : extract::selector_from_json(sel);
      request.requester = body.at("requester").get<std::string>();
      request.requester_country = body.value("requester_country", std::string());
      if (body.contains("profile") && !body["profile"].is_null()) {
        request.profile = persona_from_json(body["profile"]);
      }
      std::string id = service_.submit_check(std::move(request));
      send_json(res, 202, {{"check_id", id}});
    } catch (const RateLimited& e) {
      send_error(res, 429, e.what());
    } catch (const nlohmann::json::exception& e) {
      send_error(res, 400, e.what());
    } catch (const Error& e) {
      send_error(res, 400, e.what());
    }
  });

  server_->Get(R"(/v1/checks/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto state = service_.status(req.matches[1]);
    if (!state) {
      send_error(res, 404, "unknown check");
      return;
    }
    send_json(res, 200, check_to_json(*state));
  });

  if (port == 0) {
    port_ = server_->bind_to_any_port(address);
  } else {
    port_ = server_->bind_to_port(address, port) ? port : -1;
  }
  if (port_ < 0) throw StoreError("cannot bind " + address + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void RequesterApi::stop() {
  if (!server_) return;
  server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

}  // namespace sheriff::net
