#include "sheriff/crawl/scheduler.hpp"

#include "sheriff/net/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>

namespace sheriff::crawl {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const PlanState& s) {
  json waves = json::array();
  for (std::size_t i = 0; i < s.waves.size(); ++i) {
    waves.push_back({{"status", to_string(s.waves[i])}, {"reason", s.reasons[i]}});
  }
  json j = {{"t0", format_timestamp(s.t0)},
            {"waves", waves},
            {"consecutive_failures", s.consecutive_failures},
            {"dropped", s.dropped}};
  if (s.last_start) j["last_start"] = format_timestamp(*s.last_start);
  return j;
}

PlanState plan_state_from_json(const json& j) {
  PlanState s;
  s.t0 = parse_timestamp(j.at("t0").get<std::string>());
  for (const auto& w : j.at("waves")) {
    s.waves.push_back(wave_status_from_string(w.at("status").get<std::string>()));
    s.reasons.push_back(w.value("reason", std::string()));
  }
  if (j.contains("last_start")) s.last_start = parse_timestamp(j["last_start"].get<std::string>());
  s.consecutive_failures = j.value("consecutive_failures", std::map<std::string, int>{});
  s.dropped = j.value("dropped", std::vector<std::string>{});
  return s;
}

std::string crawl_check_id(const std::string& plan_id, int wave, std::size_t index) {
  return plan_id + "-w" + std::to_string(wave) + "-p" + std::to_string(index);
}

CrawlRunner::CrawlRunner(net::Coordinator& coordinator, net::ObservationStore& store, net::SnapshotStore& snapshots,
                         const extract::CurrencyTable& currencies, const fx::RateTable* rates, std::string state_dir)
    : coordinator_(coordinator),
      store_(store),
      snapshots_(snapshots),
      currencies_(currencies),
      rates_(rates),
      state_dir_(std::move(state_dir)) {
  fs::create_directories(state_dir_);
}

std::string CrawlRunner::state_path(const std::string& plan_id) const {
  return (fs::path(state_dir_) / (plan_id + ".state.json")).string();
}

std::string CrawlRunner::report_path(const std::string& plan_id, int wave) const {
  return (fs::path(state_dir_) / (plan_id + ".w" + std::to_string(wave) + ".report.json")).string();
}

void CrawlRunner::save_state(const std::string& plan_id, const PlanState& state) const {
  std::string path = state_path(plan_id);
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << to_json(state).dump(2) << '\n';
    if (!out) throw net::StoreError("cannot write " + tmp);
  }
  fs::rename(tmp, path);
}

void CrawlRunner::stop() {
  stopping_ = true;
  cv_.notify_all();
}

bool CrawlRunner::sleep_until(Timestamp t) {
  std::unique_lock lock(mu_);
  cv_.wait_until(lock, std::chrono::system_clock::time_point(t), [this] { return stopping_.load(); });
  return !stopping_;
}

std::vector<WaveReport> CrawlRunner::run(const CrawlPlan& plan, const WaveCallback& on_wave) {
  plan.validate();
  PlanState state;
  bool resumed = false;
  if (fs::exists(state_path(plan.id))) {
    std::ifstream in(state_path(plan.id));
    state = plan_state_from_json(json::parse(in));
    if (static_cast<int>(state.waves.size()) != plan.wave_count) {
      throw InvalidArgument("state of plan " + plan.id + " does not match its wave count");
    }
    resumed = true;
  } else {
    state.t0 = now();
    state.waves.assign(plan.wave_count, WaveStatus::Pending);
    state.reasons.assign(plan.wave_count, "");
    save_state(plan.id, state);
  }

  std::vector<WaveReport> reports;
  auto finish = [&](WaveReport report) {
    std::ofstream out(report_path(plan.id, report.wave_index), std::ios::trunc);
    out << to_json(report).dump(2) << '\n';
    if (on_wave) on_wave(report);
    reports.push_back(std::move(report));
  };
  auto skip = [&](int k, const std::string& reason) {
    state.waves[k] = WaveStatus::Skipped;
    state.reasons[k] = reason;
    save_state(plan.id, state);
    WaveReport r;
    r.plan_id = plan.id;
    r.wave_index = k;
    r.status = WaveStatus::Skipped;
    r.skip_reason = reason;
    r.started_at = r.finished_at = now();
    finish(std::move(r));
  };

  bool ran_previous = false;
  for (int k = 0; k < plan.wave_count && !stopping_; ++k) {
    if (state.waves[k] == WaveStatus::Completed || state.waves[k] == WaveStatus::Skipped) continue;
    Timestamp slot = state.t0 + k * plan.wave_period;
    Timestamp next_slot = slot + plan.wave_period;
    bool slot_passed = plan.wave_period.count() > 0 && now() >= next_slot;
    if (state.waves[k] == WaveStatus::Running && slot_passed) {
      skip(k, "interrupted and its slot has passed");
      ran_previous = false;
      continue;
    }
    if (state.waves[k] == WaveStatus::Pending && slot_passed && !ran_previous && resumed) {
      skip(k, "slot missed while the crawler was down");
      continue;
    }
    Timestamp due = slot;
    // An interrupted wave resumes at once; last_start is its own start.
    if (state.last_start && state.waves[k] != WaveStatus::Running) {
      due = std::max(due, *state.last_start + plan.wave_period);
    }
    if (!sleep_until(due)) break;

    if (!coordinator_.wait_for_agents(plan.vantages, plan.agent_wait)) {
      std::set<std::string> present;
      for (const auto& v : coordinator_.vantages()) present.insert(v.id);
      std::string missing;
      for (const auto& id : plan.vantages) {
        if (!present.count(id)) missing += (missing.empty() ? "" : ",") + id;
      }
      skip(k, "agent set unavailable: " + missing);
      ran_previous = false;
      continue;
    }

    state.waves[k] = WaveStatus::Running;
    state.last_start = now();
    save_state(plan.id, state);
    WaveReport report = run_wave(plan, k, state);
    if (stopping_) break;
    state.waves[k] = WaveStatus::Completed;
    save_state(plan.id, state);
    finish(std::move(report));
    ran_previous = true;
  }
  return reports;
}

WaveReport CrawlRunner::run_wave(const CrawlPlan& plan, int wave, PlanState& state) {
  WaveReport report;
  report.plan_id = plan.id;
  report.wave_index = wave;
  report.status = WaveStatus::Completed;
  report.started_at = *state.last_start;

  std::set<std::string> dropped(state.dropped.begin(), state.dropped.end());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < plan.products.size(); ++i) {
    if (!dropped.count(plan.products[i].uri)) order.push_back(i);
  }
  std::mt19937_64 rng(plan.seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(wave + 1)));
  std::shuffle(order.begin(), order.end(), rng);

  std::mutex mu;
  std::size_t next = 0;
  Timestamp next_start = now();
  std::map<std::size_t, bool> usable;
  auto worker = [&] {
    while (!stopping_) {
      std::size_t idx;
      Timestamp start;
      {
        std::lock_guard lock(mu);
        if (next == order.size()) return;
        idx = order[next++];
        start = std::max(now(), next_start);
        next_start = start + plan.politeness;
      }
      if (!sleep_until(start)) return;
      const auto& product = plan.products[idx];
      net::FanOutTask task{product.uri, product.selector, std::nullopt, plan.fetch_timeout};
      net::WaveContext ctx{crawl_check_id(plan.id, wave, idx), 0, "", product.uri, product.selector};
      net::CollectResult collected;
      bool quorum = false;
      int failures = 0;
      try {
        auto results = coordinator_.fan_out(task, plan.vantages, plan.sync_window);
        quorum = true;
        collected = net::collect_and_extract(ctx, results, currencies_, snapshots_, store_);
        failures = static_cast<int>(collected.failures.size());
      } catch (const net::WaveQuorumFailure& e) {
        for (const auto& r : e.results()) failures += r.status != net::FetchStatus::Ok;
      } catch (const Error&) {
        failures = static_cast<int>(plan.vantages.size());
      }
      std::optional<analytics::ProductProfile> profile;
      if (quorum && collected.observations.size() >= 2 && rates_) {
        try {
          profile = analytics::product_profile(collected.observations, *rates_);
        } catch (const Error&) {
        }
      }
      std::lock_guard lock(mu);
      report.failures += failures;
      report.observations += collected.observations.size();
      usable[idx] = !collected.observations.empty();
      if (profile) report.profiles.push_back(std::move(*profile));
    }
  };
  std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(plan.max_parallel), order.size());
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < n; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  for (const auto& [idx, ok] : usable) {
    const auto& uri = plan.products[idx].uri;
    int& count = state.consecutive_failures[uri];
    count = ok ? 0 : count + 1;
    if (count >= plan.drop_after_failures) {
      state.dropped.push_back(uri);
      report.dropped.push_back(uri);
      state.consecutive_failures.erase(uri);
    }
  }
  std::sort(report.profiles.begin(), report.profiles.end(),
            [](const auto& a, const auto& b) { return a.product_uri < b.product_uri; });
  report.finished_at = now();
  return report;
}

}  // namespace sheriff::crawl
