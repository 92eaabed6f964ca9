#pragma once

#include "sheriff/crawl/plan.hpp"
#include "sheriff/extract/currency.hpp"
#include "sheriff/fx/rate_table.hpp"
#include "sheriff/net/coordinator.hpp"
#include "sheriff/net/store.hpp"

#include <atomic>
#include <functional>
#include <condition_variable>
#include <map>
#include <mutex>

namespace sheriff::crawl {

class AgentSetUnavailable : public Error {
 public:
  using Error::Error;
};

// Persistent progress of one plan, kept beside its reports so a restarted
// run resumes instead of starting over.
struct PlanState {
  Timestamp t0{};
  std::vector<WaveStatus> waves;
  std::vector<std::string> reasons;
  std::optional<Timestamp> last_start;
  std::map<std::string, int> consecutive_failures;
  std::vector<std::string> dropped;
};

nlohmann::json to_json(const PlanState& s);
PlanState plan_state_from_json(const nlohmann::json& j);

// Check id of product `index` (position in the plan) in wave `wave`.
std::string crawl_check_id(const std::string& plan_id, int wave, std::size_t index);

// Runs plans wave by wave through the coordinator. Wave k is due at
// t0 + k * period and never starts before the previous wave finished or
// sooner than one period after the previous start. A wave whose slot has
// fully passed while the runner was down is skipped, never back-filled.
class CrawlRunner {
 public:
  using WaveCallback = std::function<void(const WaveReport&)>;

  CrawlRunner(net::Coordinator& coordinator, net::ObservationStore& store, net::SnapshotStore& snapshots,
              const extract::CurrencyTable& currencies, const fx::RateTable* rates, std::string state_dir);

  // Blocks until every wave is completed or skipped, or stop() is called.
  // Returns the reports produced by this call.
  std::vector<WaveReport> run(const CrawlPlan& plan, const WaveCallback& on_wave = {});
  void stop();

  std::string state_path(const std::string& plan_id) const;
  std::string report_path(const std::string& plan_id, int wave) const;

 private:
  WaveReport run_wave(const CrawlPlan& plan, int wave, PlanState& state);
  void save_state(const std::string& plan_id, const PlanState& state) const;
  bool sleep_until(Timestamp t);

  net::Coordinator& coordinator_;
  net::ObservationStore& store_;
  net::SnapshotStore& snapshots_;
  const extract::CurrencyTable& currencies_;
  const fx::RateTable* rates_;
  std::string state_dir_;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace sheriff::crawl
