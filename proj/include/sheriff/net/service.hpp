#pragma once

#include "sheriff/core/persona.hpp"
#include "sheriff/extract/currency.hpp"
#include "sheriff/fx/gate.hpp"
#include "sheriff/fx/rate_table.hpp"
#include "sheriff/net/coordinator.hpp"
#include "sheriff/net/pipeline.hpp"
#include "sheriff/net/store.hpp"

#include <condition_variable>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <thread>

namespace sheriff::net {

class RateLimited : public Error {
 public:
  using Error::Error;
};

class UnknownCheck : public Error {
 public:
  using Error::Error;
};

struct CheckRequest {
  std::string product_uri;
  extract::PriceSelector selector;
  std::string requester;  // opaque installation id
  Timestamp submitted_at{};
  std::optional<PersonaProfile> profile;
  std::string requester_country;  // ISO country, optional

  // Throws InvalidUri and InvalidArgument.
  void validate() const;
};

struct ServiceOptions {
  std::string data_dir;
  int repetitions = 3;
  Millis repetition_spacing{std::chrono::minutes(10)};
  Millis sync_window = kDefaultSyncWindow;
  Millis fetch_timeout{20000};
  int workers = 4;
  Millis dedup_window{60000};
  int rate_limit = 30;  // accepted checks per requester per rate_window
  Millis rate_window{60000};
  // Vantage ids to fan out to; empty means every registered agent.
  std::vector<std::string> vantages;
};

enum class CheckStatus { Queued, Running, Answered, Complete, Failed };

std::string to_string(CheckStatus s);

struct VantagePrice {
  std::string vantage;
  std::string country;
  std::string city;
  Money money;
};

struct CheckState {
  std::string id;
  CheckRequest request;
  CheckStatus status = CheckStatus::Queued;
  int repetitions_done = 0;
  // Answer from the first usable repetition.
  std::vector<VantagePrice> prices;
  std::vector<ExtractionFailure> failures;
  std::optional<fx::GateVerdict> gate;
  std::string error;
  std::vector<PriceObservation> observations;
};

// Accepts checks, runs each as repeated waves through the coordinator and
// records the first usable repetition as the requester's answer.
class CheckService {
 public:
  CheckService(Coordinator& coordinator, ObservationStore& store, SnapshotStore& snapshots,
               const extract::CurrencyTable& currencies, const fx::RateTable* rates, ServiceOptions options);
  ~CheckService();

  CheckService(const CheckService&) = delete;
  CheckService& operator=(const CheckService&) = delete;

  void start();
  void stop();

  // Throws InvalidUri, InvalidArgument and RateLimited. A request matching
  // an earlier (uri, selector, requester) within the dedup window returns
  // the earlier id. A zero submitted_at is replaced by the current time.
  std::string submit_check(CheckRequest request);

  std::optional<CheckState> status(const std::string& id) const;
  // Waits until the check has finished every repetition or failed.
  bool wait_complete(const std::string& id, Millis timeout) const;
  std::size_t accepted() const;
  std::string requests_path() const;

 private:
  struct Task {
    Timestamp due;
    std::uint64_t seq;
    std::string check_id;
    int repetition;
    bool operator>(const Task& o) const { return std::tie(due, seq) > std::tie(o.due, o.seq); }
  };

  void worker();
  void run(const Task& task);
  void persist(const CheckState& state);

  Coordinator& coordinator_;
  ObservationStore& store_;
  SnapshotStore& snapshots_;
  const extract::CurrencyTable& currencies_;
  const fx::RateTable* rates_;
  ServiceOptions options_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  mutable std::condition_variable done_cv_;
  bool running_ = false;
  std::vector<std::thread> workers_;
  std::priority_queue<Task, std::vector<Task>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_id_ = 1;
  std::string id_prefix_;
  std::map<std::string, CheckState> checks_;
  std::map<std::string, std::pair<std::string, Timestamp>> recent_;
  std::map<std::string, std::deque<Timestamp>> requester_log_;
  std::ofstream requests_;
};

}  // namespace sheriff::net
