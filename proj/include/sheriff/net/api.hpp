#pragma once

#include "sheriff/net/service.hpp"

#include <memory>
#include <thread>

namespace httplib {
class Server;
}

namespace sheriff::net {

nlohmann::json check_to_json(const CheckState& state);

// HTTP front end for the browser extension:
//   POST /v1/checks {product_uri, selector, profile?, requester, requester_country?}
//        -> 202 {check_id}; 400 on invalid input; 429 when rate limited
//   GET  /v1/checks/{id} -> 200 check document; 404 for unknown ids
class RequesterApi {
 public:
  explicit RequesterApi(CheckService& service);
  ~RequesterApi();

  RequesterApi(const RequesterApi&) = delete;
  RequesterApi& operator=(const RequesterApi&) = delete;

  // Port 0 binds an ephemeral port. Throws StoreError when binding fails.
  void start(const std::string& address, int port);
  void stop();
  int port() const { return port_; }

 private:
  CheckService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace sheriff::net
