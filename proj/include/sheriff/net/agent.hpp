#pragma once

#include "sheriff/net/fetch.hpp"
#include "sheriff/net/socket.hpp"

#include <atomic>
#include <condition_variable>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <random>
#include <thread>

namespace sheriff::net {

struct AgentOptions {
  std::string id;
  std::string country;
  std::string city;
  std::string coordinator_host = "127.0.0.1";
  int coordinator_port = 0;
  std::vector<std::pair<std::string, std::string>> extra_headers;
  std::map<std::string, std::string> resolve;
  Millis reconnect_delay{200};

  // Simulation knobs: a constant error on the agent's clock and a random
  // delay between the scheduled start and the actual fetch.
  Millis clock_skew{0};
  Millis max_start_jitter{0};
  std::uint64_t seed = 0;
  // Called with the true wall-clock time right before each fetch.
  std::function<void(const std::string& wave, Timestamp actual_start)> on_fetch_start;
};

// Vantage-point agent: keeps a connection to the coordinator (reconnecting
// as needed), answers PREPARE with READY and fetches at the GO deadline.
class Agent {
 public:
  explicit Agent(AgentOptions options);
  ~Agent();

  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  void start();
  void stop();
  bool registered() const { return registered_.load(); }
  bool wait_registered(Millis timeout) const;
  const AgentOptions& options() const { return options_; }
  // Estimated coordinator clock minus local clock.
  Millis clock_offset() const { return Millis(offset_ms_.load()); }

 private:
  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };

  void run();
  void session();
  std::int64_t local_clock_ms() const;
  void launch(std::shared_ptr<FrameWriter> writer, PrepareMsg prepare, GoMsg go);
  void reap(bool all);
  std::shared_ptr<std::mutex> target_lock(const std::string& key);

  AgentOptions options_;
  std::atomic<bool> running_{false};
  std::atomic<bool> registered_{false};
  std::atomic<std::int64_t> offset_ms_{0};
  std::thread thread_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  int active_fd_ = -1;
  std::list<Worker> workers_;
  std::map<std::string, std::shared_ptr<std::mutex>> target_locks_;
  std::mt19937_64 rng_;
};

}  // namespace sheriff::net
