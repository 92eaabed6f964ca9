#pragma once

#include "sheriff/net/agent.hpp"
#include "sheriff/net/coordinator.hpp"
#include "sheriff/sim/fleet.hpp"
#include "sheriff/sim/generator.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sheriff::testsupport {

struct VantageDef {
  std::string id;
  std::string country;
  std::string city;
  std::string region;  // simulator region the agent is placed in
};

inline std::vector<VantageDef> default_vantages() {
  return {{"fi-tampere", "FI", "Tampere", "FI"},   {"br-saopaulo", "BR", "Sao Paulo", "BR"},
          {"us-nyc", "US", "New York", "US-NY"},   {"us-chi", "US", "Chicago", "US-CHI"},
          {"us-lax", "US", "Los Angeles", "US-LA"}, {"us-bos", "US", "Boston", "US-BOS"},
          {"us-sea", "US", "Seattle", "US-SEA"},   {"us-atl", "US", "Atlanta", "US-ATL"},
          {"de-berlin", "DE", "Berlin", "DE"},     {"uk-london", "GB", "London", "UK"},
          {"es-madrid", "ES", "Madrid", "ES"},     {"fr-paris", "FR", "Paris", "FR"},
          {"jp-tokyo", "JP", "Tokyo", "JP"},       {"au-sydney", "AU", "Sydney", "AU"}};
}

// Fleet spec whose regions are exactly the default vantage regions.
inline sim::FleetSpec vantage_fleet_spec(int retailers, std::uint64_t seed) {
  sim::FleetSpec spec;
  spec.retailers = retailers;
  spec.seed = seed;
  spec.regions.clear();
  for (const auto& v : default_vantages()) spec.regions.push_back(v.region);
  spec.display_currency = {{"FI", "EUR"}, {"DE", "EUR"}, {"ES", "EUR"}, {"FR", "EUR"}, {"UK", "GBP"}, {"BR", "BRL"}};
  return spec;
}

// Simulator fleet, coordinator and one agent per vantage, all in-process.
class Testbed {
 public:
  using AgentTweak = std::function<void(net::AgentOptions&, std::size_t index)>;

  Testbed(std::vector<sim::PricingPolicy> policies, std::vector<VantageDef> vantages,
          net::CoordinatorOptions coordinator_options = {}, const AgentTweak& tweak = {})
      : vantages_(std::move(vantages)) {
    fleet_ = std::make_unique<sim::SimFleet>(std::move(policies));
    fleet_->start();
    coordinator_ = std::make_unique<net::Coordinator>(coordinator_options);
    coordinator_->start();
    for (std::size_t i = 0; i < vantages_.size(); ++i) {
      net::AgentOptions o;
      o.id = vantages_[i].id;
      o.country = vantages_[i].country;
      o.city = vantages_[i].city;
      o.coordinator_port = coordinator_->port();
      o.extra_headers = {{sim::kRegionHeader, vantages_[i].region}};
      o.resolve = fleet_->host_map();
      o.seed = i + 1;
      if (tweak) tweak(o, i);
      agents_.push_back(std::make_unique<net::Agent>(std::move(o)));
      agents_.back()->start();
    }
    if (!coordinator_->wait_for_agents(ids(), Millis(10000))) throw std::runtime_error("agents did not register");
  }

  ~Testbed() {
    for (auto& a : agents_) a->stop();
    coordinator_->stop();
    fleet_->stop();
  }

  sim::SimFleet& fleet() { return *fleet_; }
  net::Coordinator& coordinator() { return *coordinator_; }
  net::Agent& agent(std::size_t i) { return *agents_.at(i); }
  const std::vector<VantageDef>& vantages() const { return vantages_; }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& v : vantages_) out.push_back(v.id);
    return out;
  }

  const VantageDef& vantage(const std::string& id) const {
    for (const auto& v : vantages_) {
      if (v.id == id) return v;
    }
    throw std::out_of_range(id);
  }

 private:
  std::vector<VantageDef> vantages_;
  std::unique_ptr<sim::SimFleet> fleet_;
  std::unique_ptr<net::Coordinator> coordinator_;
  std::vector<std::unique_ptr<net::Agent>> agents_;
};

}  // namespace sheriff::testsupport
