#include "sheriff/net/coordinator.hpp"

#include <algorithm>

namespace sheriff::net {

namespace {

constexpr Millis kAcceptPoll{200};
constexpr Millis kReadPoll{500};
constexpr Millis kRegisterTimeout{5000};

}  // namespace

struct Coordinator::Connection {
  explicit Connection(Socket s) : sock(std::move(s)), writer(sock.fd()) {}
  Socket sock;
  FrameWriter writer;
  VantagePoint vantage;
  std::atomic<bool> alive{true};
  std::atomic<bool> finished{false};
  std::thread thread;
};

struct Coordinator::Wave {
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::string, bool> ready;
  std::map<std::string, ResultMsg> results;
};

Coordinator::Coordinator(CoordinatorOptions options) : options_(std::move(options)) {}

Coordinator::~Coordinator() { stop(); }

void Coordinator::start() {
  if (running_.exchange(true)) return;
  listener_ = listen_tcp(options_.bind_address, options_.port, &port_);
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void Coordinator::stop() {
  if (!running_.exchange(false)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  listener_.close();
  {
    std::lock_guard lock(mu_);
    for (auto& c : connections_) c->sock.shutdown();
  }
  reap(true);
  std::lock_guard lock(mu_);
  agents_.clear();
  for (auto& [id, wave] : waves_) wave->cv.notify_all();
}

void Coordinator::accept_loop() {
  while (running_) {
    Socket sock;
    try {
      sock = accept_tcp(listener_, kAcceptPoll);
    } catch (const Error&) {
      continue;
    }
    reap(false);
    if (!sock.valid()) continue;
    auto conn = std::make_shared<Connection>(std::move(sock));
    std::lock_guard lock(mu_);
    connections_.push_back(conn);
    conn->thread = std::thread([this, conn] { serve(conn); });
  }
}

void Coordinator::reap(bool all) {
  std::vector<std::shared_ptr<Connection>> done;
  {
    std::lock_guard lock(mu_);
    auto it = std::stable_partition(connections_.begin(), connections_.end(),
                                    [all](const auto& c) { return !all && !c->finished.load(); });
    done.assign(it, connections_.end());
    connections_.erase(it, connections_.end());
  }
  for (auto& c : done) {
    if (c->thread.joinable()) c->thread.join();
  }
}

void Coordinator::serve(std::shared_ptr<Connection> conn) {
  FrameReader reader(conn->sock.fd());
  try {
    auto hello = reader.next(kRegisterTimeout);
    if (!hello || message_type(*hello) != "REGISTER") throw ProtocolError("expected REGISTER");
    RegisterMsg reg = register_from_json(*hello);
    conn->vantage = {reg.id, reg.country, reg.city, "fd:" + std::to_string(conn->sock.fd())};
    conn->writer.send(registered_msg(to_epoch_ms(now())));
    {
      std::lock_guard lock(mu_);
      auto& slot = agents_[reg.id];
      if (slot && slot != conn) {
        slot->alive = false;
        slot->sock.shutdown();
      }
      slot = conn;
    }
    registry_cv_.notify_all();

    while (running_ && conn->alive) {
      auto msg = reader.next(kReadPoll);
      if (!msg) continue;
      std::string type = message_type(*msg);
      if (type != "READY" && type != "RESULT") continue;
      std::string wave_id = msg->at("wave").get<std::string>();
      std::shared_ptr<Wave> wave;
      {
        std::lock_guard lock(mu_);
        auto it = waves_.find(wave_id);
        if (it != waves_.end()) wave = it->second;
      }
      if (!wave) continue;
      {
        std::lock_guard lock(wave->mu);
        if (type == "READY") {
          wave->ready[conn->vantage.id] = true;
        } else {
          wave->results[conn->vantage.id] = result_from_json(*msg);
        }
      }
      wave->cv.notify_all();
    }
  } catch (const Error&) {
  }
  conn->alive = false;
  {
    std::lock_guard lock(mu_);
    auto it = agents_.find(conn->vantage.id);
    if (it != agents_.end() && it->second == conn) agents_.erase(it);
    for (auto& [id, wave] : waves_) wave->cv.notify_all();
  }
  registry_cv_.notify_all();
  conn->finished = true;
}

std::vector<VantagePoint> Coordinator::vantages() const {
  std::lock_guard lock(mu_);
  std::vector<VantagePoint> out;
  for (const auto& [id, conn] : agents_) out.push_back(conn->vantage);
  return out;
}

bool Coordinator::wait_for_agents(const std::vector<std::string>& ids, Millis timeout) const {
  std::unique_lock lock(mu_);
  return registry_cv_.wait_for(lock, timeout, [&] {
    return std::all_of(ids.begin(), ids.end(), [&](const auto& id) { return agents_.count(id) > 0; });
  });
}

bool Coordinator::wait_for_agent_count(std::size_t n, Millis timeout) const {
  std::unique_lock lock(mu_);
  return registry_cv_.wait_for(lock, timeout, [&] { return agents_.size() >= n; });
}

std::vector<FetchResult> Coordinator::fan_out(const FanOutTask& task, const std::vector<std::string>& vantage_ids,
                                              Millis sync_window) {
  if (vantage_ids.size() < 2) throw InvalidArgument("fan-out needs at least two vantage points");
  auto wave = std::make_shared<Wave>();
  std::string wave_id;
  std::map<std::string, std::shared_ptr<Connection>> conns;
  {
    std::lock_guard lock(mu_);
    wave_id = "w" + std::to_string(next_wave_++);
    waves_[wave_id] = wave;
    for (const auto& id : vantage_ids) {
      auto it = agents_.find(id);
      if (it != agents_.end()) conns[id] = it->second;
    }
  }
  struct Cleanup {
    Coordinator* self;
    std::string id;
    ~Cleanup() {
      std::lock_guard lock(self->mu_);
      self->waves_.erase(id);
    }
  } cleanup{this, wave_id};

  std::map<std::string, std::string> failure;
  for (const auto& id : vantage_ids) {
    if (!conns.count(id)) failure[id] = "agent not registered";
  }

  PrepareMsg prepare{wave_id, task.uri, task.selector, task.profile, task.fetch_timeout.count()};
  nlohmann::json prepare_json = to_json(prepare);
  for (auto it = conns.begin(); it != conns.end();) {
    try {
      it->second->writer.send(prepare_json);
      ++it;
    } catch (const Error&) {
      failure[it->first] = "agent connection lost";
      it = conns.erase(it);
    }
  }

  auto all_ready = [&] {
    return std::all_of(conns.begin(), conns.end(), [&](const auto& kv) {
      return wave->ready.count(kv.first) || !kv.second->alive.load();
    });
  };
  {
    std::unique_lock lock(wave->mu);
    wave->cv.wait_for(lock, options_.ready_timeout, all_ready);
    for (auto it = conns.begin(); it != conns.end();) {
      if (!wave->ready.count(it->first)) {
        failure[it->first] = "missed READY";
        try {
          it->second->writer.send(abort_msg(wave_id));
        } catch (const Error&) {
        }
        it = conns.erase(it);
      } else {
        ++it;
      }
    }
  }

  std::int64_t start_at = to_epoch_ms(now()) + options_.go_lead.count();
  nlohmann::json go_json = to_json(GoMsg{wave_id, start_at, sync_window.count()});
  for (auto it = conns.begin(); it != conns.end();) {
    try {
      it->second->writer.send(go_json);
      ++it;
    } catch (const Error&) {
      failure[it->first] = "agent connection lost";
      it = conns.erase(it);
    }
  }

  auto deadline = std::chrono::system_clock::time_point(Millis(start_at)) + task.fetch_timeout + options_.result_grace;
  std::map<std::string, ResultMsg> results;
  {
    std::unique_lock lock(wave->mu);
    wave->cv.wait_until(lock, deadline, [&] {
      return std::all_of(conns.begin(), conns.end(), [&](const auto& kv) {
        return wave->results.count(kv.first) || !kv.second->alive.load();
      });
    });
    results = wave->results;
  }

  std::vector<FetchResult> out;
  std::optional<std::int64_t> earliest;
  for (const auto& [id, r] : results) {
    if (conns.count(id) && (!earliest || r.started_at < *earliest)) earliest = r.started_at;
  }
  std::size_t ok = 0;
  for (const auto& id : vantage_ids) {
    FetchResult fr;
    fr.vantage = id;
    auto r = results.find(id);
    if (conns.count(id) && r != results.end()) {
      fr.status = r->second.status;
      fr.http_status = r->second.http_status;
      fr.page = r->second.body;
      fr.started_at = from_epoch_ms(r->second.started_at);
      fr.latency = Millis(r->second.latency_ms);
      fr.error = r->second.error;
      if (r->second.started_at > *earliest + sync_window.count()) {
        fr.status = FetchStatus::Timeout;
        fr.page.reset();
        fr.error = "started outside the sync window";
      }
    } else {
      fr.status = FetchStatus::Timeout;
      fr.started_at = from_epoch_ms(start_at);
      auto f = failure.find(id);
      fr.error = f != failure.end() ? f->second : "no result before deadline";
    }
    if (fr.status == FetchStatus::Ok) ++ok;
    out.push_back(std::move(fr));
  }
  if (ok < 2) {
    throw WaveQuorumFailure("wave " + wave_id + " has " + std::to_string(ok) + " ok results", std::move(out));
  }
  return out;
}

}  // namespace sheriff::net
