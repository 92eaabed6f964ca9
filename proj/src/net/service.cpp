#include "sheriff/net/service.hpp"

#include "sheriff/core/uri.hpp"

#include <filesystem>
#include <random>

namespace sheriff::net {

namespace fs = std::filesystem;

namespace {

bool finished(CheckStatus s) { return s == CheckStatus::Complete || s == CheckStatus::Failed; }

std::string dedup_key(const CheckRequest& r) {
  return r.product_uri + '\n' + to_json(r.selector).dump() + '\n' + r.requester;
}

}  // namespace

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Queued:
      return "queued";
    case CheckStatus::Running:
      return "running";
    case CheckStatus::Answered:
      return "answered";
    case CheckStatus::Complete:
      return "complete";
    case CheckStatus::Failed:
      return "failed";
  }
  return "unknown";
}

void CheckRequest::validate() const {
  parse_uri(product_uri);
  if (requester.empty()) throw InvalidArgument("requester must be non-empty");
  selector.validate();
  if (profile) profile->validate();
}

CheckService::CheckService(Coordinator& coordinator, ObservationStore& store, SnapshotStore& snapshots,
                           const extract::CurrencyTable& currencies, const fx::RateTable* rates,
                           ServiceOptions options)
    : coordinator_(coordinator),
      store_(store),
      snapshots_(snapshots),
      currencies_(currencies),
      rates_(rates),
      options_(std::move(options)) {
  if (options_.repetitions < 1) throw InvalidArgument("repetitions must be at least 1");
  if (options_.workers < 1) throw InvalidArgument("workers must be at least 1");
  if (options_.data_dir.empty()) throw InvalidArgument("data_dir must be set");
  fs::create_directories(options_.data_dir);
  requests_.open(requests_path(), std::ios::app);
  if (!requests_) throw StoreError("cannot open " + requests_path());
  std::random_device rd;
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", rd());
  id_prefix_ = std::string("c") + buf + "-";
}

CheckService::~CheckService() { stop(); }

std::string CheckService::requests_path() const { return (fs::path(options_.data_dir) / "checks.jsonl").string(); }

void CheckService::start() {
  std::lock_guard lock(mu_);
  if (running_) return;
  running_ = true;
  for (int i = 0; i < options_.workers; ++i) workers_.emplace_back([this] { worker(); });
}

void CheckService::stop() {
  {
    std::lock_guard lock(mu_);
    if (!running_) return;
    running_ = false;
  }
  cv_.notify_all();
  for (auto& t : workers_) t.join();
  workers_.clear();
}

std::string CheckService::submit_check(CheckRequest request) {
  request.validate();
  if (request.submitted_at == Timestamp{}) request.submitted_at = now();
  std::string key = dedup_key(request);
  std::lock_guard lock(mu_);
  auto hit = recent_.find(key);
  if (hit != recent_.end() && request.submitted_at - hit->second.second <= options_.dedup_window) {
    return hit->second.first;
  }
  auto& log = requester_log_[request.requester];
  while (!log.empty() && request.submitted_at - log.front() >= options_.rate_window) log.pop_front();
  if (static_cast<int>(log.size()) >= options_.rate_limit) {
    throw RateLimited("requester " + request.requester + " is over the rate limit");
  }
  log.push_back(request.submitted_at);

  std::string id = id_prefix_ + std::to_string(next_id_++);
  recent_[key] = {id, request.submitted_at};
  CheckState state;
  state.id = id;
  state.request = std::move(request);
  persist(state);
  Timestamp base = now();
  for (int rep = 0; rep < options_.repetitions; ++rep) {
    queue_.push({base + rep * options_.repetition_spacing, seq_++, id, rep});
  }
  checks_.emplace(id, std::move(state));
  cv_.notify_all();
  return id;
}

void CheckService::persist(const CheckState& state) {
  const auto& r = state.request;
  nlohmann::json j = {{"check_id", state.id},
                      {"product_uri", r.product_uri},
                      {"selector", to_json(r.selector)},
                      {"requester", r.requester},
                      {"submitted_at", format_timestamp(r.submitted_at)}};
  if (!r.requester_country.empty()) j["requester_country"] = r.requester_country;
  if (r.profile) j["profile"] = to_redacted_json(*r.profile);
  requests_ << j.dump() << '\n';
  requests_.flush();
  if (!requests_) throw StoreError("cannot append to " + requests_path());
}

std::optional<CheckState> CheckService::status(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = checks_.find(id);
  if (it == checks_.end()) return std::nullopt;
  return it->second;
}

bool CheckService::wait_complete(const std::string& id, Millis timeout) const {
  std::unique_lock lock(mu_);
  if (!checks_.count(id)) throw UnknownCheck("no check " + id);
  return done_cv_.wait_for(lock, timeout, [&] { return finished(checks_.at(id).status); });
}

std::size_t CheckService::accepted() const {
  std::lock_guard lock(mu_);
  return checks_.size();
}

void CheckService::worker() {
  std::unique_lock lock(mu_);
  while (running_) {
    if (queue_.empty()) {
      cv_.wait(lock);
      continue;
    }
    Task top = queue_.top();
    if (top.due > now()) {
      cv_.wait_until(lock, top.due);
      continue;
    }
    queue_.pop();
    auto& state = checks_.at(top.check_id);
    if (state.status == CheckStatus::Queued) state.status = CheckStatus::Running;
    lock.unlock();
    run(top);
    lock.lock();
  }
}

void CheckService::run(const Task& task) {
  CheckRequest request;
  std::vector<PriceObservation> earlier;
  {
    std::lock_guard lock(mu_);
    const auto& state = checks_.at(task.check_id);
    request = state.request;
    earlier = state.observations;
  }

  std::vector<std::string> ids = options_.vantages;
  std::map<std::string, VantagePoint> known;
  for (auto& v : coordinator_.vantages()) known[v.id] = v;
  if (ids.empty()) {
    for (const auto& [id, v] : known) ids.push_back(id);
  }

  FanOutTask fan{request.product_uri, request.selector, request.profile, options_.fetch_timeout};
  WaveContext wave{task.check_id, task.repetition, request.profile ? request.profile->name : std::string(),
                   request.product_uri, request.selector};
  std::vector<FetchResult> results;
  std::string error;
  bool usable = false;
  try {
    results = coordinator_.fan_out(fan, ids, options_.sync_window);
    usable = true;
  } catch (const WaveQuorumFailure& e) {
    results = e.results();
    error = e.what();
  } catch (const Error& e) {
    error = e.what();
  }

  CollectResult collected;
  if (usable) {
    try {
      collected = collect_and_extract(wave, results, currencies_, snapshots_, store_, earlier);
    } catch (const Error& e) {
      error = e.what();
      usable = false;
    }
  } else {
    for (const auto& r : results) {
      if (r.status != FetchStatus::Ok) collected.failures.push_back({r.vantage, to_string(r.status), r.error});
    }
  }

  std::optional<fx::GateVerdict> gate;
  if (usable && collected.observations.size() >= 2 && rates_) {
    try {
      gate = fx::currency_gate(collected.observations, *rates_);
    } catch (const Error&) {
    }
  }

  std::lock_guard lock(mu_);
  auto& state = checks_.at(task.check_id);
  state.repetitions_done += 1;
  for (auto& o : collected.observations) state.observations.push_back(o);
  bool answered = state.status == CheckStatus::Answered;
  if (!answered && usable) {
    state.prices.clear();
    for (const auto& o : collected.observations) {
      auto v = known.find(o.vantage);
      state.prices.push_back({o.vantage, v != known.end() ? v->second.country : std::string(),
                              v != known.end() ? v->second.city : std::string(), o.money});
    }
    state.failures = collected.failures;
    state.gate = gate;
    state.error.clear();
    state.status = CheckStatus::Answered;
    answered = true;
  } else if (!answered) {
    state.failures = collected.failures;
    state.error = error;
  }
  if (state.repetitions_done == options_.repetitions) {
    state.status = answered ? CheckStatus::Complete : CheckStatus::Failed;
    done_cv_.notify_all();
  }
}

}  // namespace sheriff::net
