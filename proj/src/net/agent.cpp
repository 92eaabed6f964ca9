#include "sheriff/net/agent.hpp"

#include <sys/socket.h>

namespace sheriff::net {

namespace {

constexpr Millis kPoll{200};

// Keeps the descriptor alive while fetch workers may still reply on it.
struct Link {
  explicit Link(Socket s) : sock(std::move(s)), writer(sock.fd()) {}
  ~Link() { sock.shutdown(); }
  Socket sock;
  FrameWriter writer;
};

}  // namespace

Agent::Agent(AgentOptions options) : options_(std::move(options)), rng_(options_.seed) {
  if (options_.id.empty()) throw InvalidArgument("agent id must be non-empty");
}

Agent::~Agent() { stop(); }

void Agent::start() {
  if (running_.exchange(true)) return;
  thread_ = std::thread([this] { run(); });
}

void Agent::stop() {
  if (!running_.exchange(false)) return;
  {
    std::lock_guard lock(mu_);
    if (active_fd_ >= 0) ::shutdown(active_fd_, SHUT_RDWR);
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
  reap(true);
}

bool Agent::wait_registered(Millis timeout) const {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, timeout, [this] { return registered_.load(); });
}

std::int64_t Agent::local_clock_ms() const { return to_epoch_ms(now()) + options_.clock_skew.count(); }

void Agent::run() {
  while (running_) {
    try {
      session();
    } catch (const Error&) {
    }
    registered_ = false;
    std::unique_lock lock(mu_);
    active_fd_ = -1;
    cv_.wait_for(lock, options_.reconnect_delay, [this] { return !running_.load(); });
  }
}

void Agent::session() {
  auto link = std::make_shared<Link>(connect_tcp(options_.coordinator_host, options_.coordinator_port, Millis(2000)));
  {
    std::lock_guard lock(mu_);
    if (!running_) return;
    active_fd_ = link->sock.fd();
  }
  std::shared_ptr<FrameWriter> writer(link, &link->writer);
  FrameReader reader(link->sock.fd());
  struct Closer {
    Link& link;
    ~Closer() { link.sock.shutdown(); }
  } closer{*link};

  std::int64_t sent_at = local_clock_ms();
  writer->send(to_json(RegisterMsg{options_.id, options_.country, options_.city, sent_at}));
  auto reply = reader.next(Millis(5000));
  if (!reply || message_type(*reply) != "REGISTERED") throw ProtocolError("no REGISTERED reply");
  std::int64_t received_at = local_clock_ms();
  std::int64_t coordinator_clock = reply->at("clock").get<std::int64_t>();
  offset_ms_ = coordinator_clock - (sent_at + received_at) / 2;
  {
    std::lock_guard lock(mu_);
    registered_ = true;
  }
  cv_.notify_all();

  std::map<std::string, PrepareMsg> pending;
  while (running_) {
    reap(false);
    auto msg = reader.next(kPoll);
    if (!msg) continue;
    std::string type = message_type(*msg);
    if (type == "PREPARE") {
      PrepareMsg prepare = prepare_from_json(*msg);
      std::string wave = prepare.wave;
      pending[wave] = std::move(prepare);
      writer->send(ready_msg(wave));
    } else if (type == "GO") {
      GoMsg go = go_from_json(*msg);
      auto it = pending.find(go.wave);
      if (it == pending.end()) continue;
      launch(writer, std::move(it->second), go);
      pending.erase(it);
    } else if (type == "ABORT") {
      pending.erase(msg->at("wave").get<std::string>());
    }
  }
}

std::shared_ptr<std::mutex> Agent::target_lock(const std::string& key) {
  std::lock_guard lock(mu_);
  auto& slot = target_locks_[key];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

void Agent::launch(std::shared_ptr<FrameWriter> writer, PrepareMsg prepare, GoMsg go) {
  Millis jitter{0};
  {
    std::lock_guard lock(mu_);
    if (options_.max_start_jitter.count() > 0) {
      std::uniform_int_distribution<std::int64_t> d(0, options_.max_start_jitter.count());
      jitter = Millis(d(rng_));
    }
  }
  std::string key = prepare.uri + "|" + (prepare.profile ? prepare.profile->name : std::string());
  auto lock = target_lock(key);
  auto done = std::make_shared<std::atomic<bool>>(false);
  std::thread t([this, writer, prepare = std::move(prepare), go, jitter, lock, done] {
    std::int64_t local_start = go.start_at - offset_ms_.load();
    std::int64_t wait = local_start - local_clock_ms();
    if (wait > 0) {
      std::unique_lock guard(mu_);
      cv_.wait_for(guard, Millis(wait), [this] { return !running_.load(); });
    }
    if (jitter.count() > 0) std::this_thread::sleep_for(jitter);
    if (running_) {
      std::lock_guard serial(*lock);
      if (options_.on_fetch_start) options_.on_fetch_start(prepare.wave, now());
      std::int64_t started_local = local_clock_ms();
      FetchOptions fetch;
      fetch.timeout = Millis(prepare.timeout_ms);
      fetch.extra_headers = options_.extra_headers;
      fetch.resolve = options_.resolve;
      FetchResult r = agent_fetch(prepare.uri, prepare.selector, prepare.profile, fetch);
      ResultMsg msg;
      msg.wave = prepare.wave;
      msg.status = r.status;
      msg.http_status = r.http_status;
      msg.body = std::move(r.page);
      msg.started_at = started_local + offset_ms_.load();
      msg.latency_ms = r.latency.count();
      msg.error = r.error;
      try {
        writer->send(to_json(msg));
      } catch (const Error&) {
      }
    }
    done->store(true);
  });
  std::lock_guard guard(mu_);
  workers_.push_back({std::move(t), done});
}

void Agent::reap(bool all) {
  std::list<Worker> finished;
  {
    std::lock_guard lock(mu_);
    for (auto it = workers_.begin(); it != workers_.end();) {
      if (all || it->done->load()) {
        auto next = std::next(it);
        finished.splice(finished.end(), workers_, it);
        it = next;
      } else {
        ++it;
      }
    }
  }
  for (auto& w : finished) {
    if (w.thread.joinable()) w.thread.join();
  }
}

}  // namespace sheriff::net
