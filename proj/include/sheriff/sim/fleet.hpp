#pragma once

#include "sheriff/core/errors.hpp"
#include "sheriff/sim/policy.hpp"
#include "sheriff/sim/pricing.hpp"

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace sheriff::sim {

class BindFailure : public Error {
 public:
  using Error::Error;
};

inline constexpr const char* kRegionHeader = "X-Sim-Region";
inline constexpr const char* kSessionCookie = "simsid";

struct FleetOptions {
  std::string bind_address = "127.0.0.1";
  // Policy i listens on base_port + i; 0 picks ephemeral ports.
  int base_port = 0;
  std::size_t request_log_capacity = 4096;
};

struct RecordedRequest {
  std::string domain;
  std::string path;
  std::string remote_address;
  std::map<std::string, std::string> headers;  // lower-case names
};

// One HTTP endpoint per pricing policy. Policies are immutable once the
// fleet starts; the session table and request log are shared and locked.
class SimFleet {
 public:
  SimFleet(std::vector<PricingPolicy> policies, FleetOptions options = {});
  ~SimFleet();

  SimFleet(const SimFleet&) = delete;
  SimFleet& operator=(const SimFleet&) = delete;

  // Throws BindFailure (duplicate domains are rejected as InvalidPolicy).
  void start();
  void stop();

  std::size_t size() const;
  const std::vector<PricingPolicy>& policies() const { return policies_; }
  const PricingPolicy& policy(std::string_view domain) const;

  int port(std::string_view domain) const;
  // "http://<domain>:<port>"; resolve the domain with host_map().
  std::string origin(std::string_view domain) const;
  std::string product_uri(std::string_view domain, std::string_view product_id) const;
  std::string listing_uri(std::string_view domain, int page) const;
  // domain -> bind address, for clients that cannot resolve sim domains.
  std::map<std::string, std::string> host_map() const;

  std::vector<RecordedRequest> requests() const;
  void clear_requests();

 private:
  struct Endpoint;
  struct SharedState;

  std::vector<PricingPolicy> policies_;
  FleetOptions options_;
  std::vector<std::unique_ptr<Endpoint>> endpoints_;
  std::shared_ptr<SharedState> state_;
};

}  // namespace sheriff::sim
