#pragma once

#include "sheriff/core/errors.hpp"
#include "sheriff/net/fetch.hpp"
#include "sheriff/net/socket.hpp"

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace sheriff::net {

// Fewer than two ok results; the results are kept for failure reporting.
class WaveQuorumFailure : public QuorumFailure {
 public:
  WaveQuorumFailure(const std::string& what, std::vector<FetchResult> results)
      : QuorumFailure(what), results_(std::move(results)) {}
  const std::vector<FetchResult>& results() const { return results_; }

 private:
  std::vector<FetchResult> results_;
};

struct VantagePoint {
  std::string id;
  std::string country;
  std::string city;
  std::string endpoint;  // peer address as seen by the coordinator
};

struct CoordinatorOptions {
  std::string bind_address = "127.0.0.1";
  int port = 0;
  Millis ready_timeout{5000};
  // Delay between broadcasting GO and the common start deadline.
  Millis go_lead{250};
  // Extra time after the fetch deadline before a result counts as missing.
  Millis result_grace{2000};
};

struct FanOutTask {
  std::string uri;
  extract::PriceSelector selector;
  std::optional<PersonaProfile> profile;
  Millis fetch_timeout{20000};
};

inline constexpr Millis kDefaultSyncWindow{5000};

// Accepts agent connections and runs two-phase barrier waves over them.
// fan_out is safe to call from many threads; each wave is independent.
class Coordinator {
 public:
  explicit Coordinator(CoordinatorOptions options = {});
  ~Coordinator();

  Coordinator(const Coordinator&) = delete;
  Coordinator& operator=(const Coordinator&) = delete;

  void start();
  void stop();
  int port() const { return port_; }

  std::vector<VantagePoint> vantages() const;
  bool wait_for_agents(const std::vector<std::string>& ids, Millis timeout) const;
  bool wait_for_agent_count(std::size_t n, Millis timeout) const;

  // PREPARE to every vantage, READY barrier, GO with a common start
  // deadline, then one FetchResult per vantage in input order. Agents that
  // miss READY or never answer are timeouts; a start later than the
  // earliest start plus sync_window is a timeout too. Throws
  // InvalidArgument for fewer than two vantages and WaveQuorumFailure when
  // fewer than two results are ok.
  std::vector<FetchResult> fan_out(const FanOutTask& task, const std::vector<std::string>& vantage_ids,
                                   Millis sync_window = kDefaultSyncWindow);

 private:
  struct Connection;
  struct Wave;

  void accept_loop();
  void serve(std::shared_ptr<Connection> conn);
  void reap(bool all);

  CoordinatorOptions options_;
  int port_ = 0;
  Socket listener_;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;

  mutable std::mutex mu_;
  mutable std::condition_variable registry_cv_;
  std::map<std::string, std::shared_ptr<Connection>> agents_;
  std::vector<std::shared_ptr<Connection>> connections_;
  std::map<std::string, std::shared_ptr<Wave>> waves_;
  std::uint64_t next_wave_ = 1;
};

}  // namespace sheriff::net
