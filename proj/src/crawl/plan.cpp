#include "sheriff/crawl/plan.hpp"

#include "sheriff/analytics/report.hpp"
#include "sheriff/core/uri.hpp"

#include <fstream>
#include <set>

namespace sheriff::crawl {

using nlohmann::json;

void CrawlPlan::validate() const {
  if (id.empty()) throw InvalidArgument("plan id must be non-empty");
  if (domain.empty()) throw InvalidArgument("plan domain must be non-empty");
  if (cap < 1) throw InvalidArgument("cap must be at least 1");
  if (products.empty() || static_cast<int>(products.size()) > cap) {
    throw InvalidArgument("plan needs between 1 and " + std::to_string(cap) + " products");
  }
  if (wave_count < 1) throw InvalidArgument("wave_count must be at least 1");
  if (wave_period.count() < 0) throw InvalidArgument("wave_period must be non-negative");
  if (vantages.size() < 2) throw InvalidArgument("plan needs at least two vantages");
  if (std::set<std::string>(vantages.begin(), vantages.end()).size() != vantages.size()) {
    throw InvalidArgument("duplicate vantage ids");
  }
  if (max_parallel < 1) throw InvalidArgument("max_parallel must be at least 1");
  if (drop_after_failures < 1) throw InvalidArgument("drop_after_failures must be at least 1");
  for (const auto& p : products) {
    if (parse_uri(p.uri).host != domain) throw InvalidArgument(p.uri + " is not on " + domain);
  }
}

CrawlPlan make_plan(std::string id, std::string domain, const std::vector<CatalogEntry>& catalog, int cap,
                    int wave_count, Millis wave_period, std::uint64_t seed, std::vector<std::string> vantages) {
  CrawlPlan plan;
  plan.id = std::move(id);
  plan.domain = std::move(domain);
  plan.cap = cap;
  plan.products = sample_products(catalog, cap, seed);
  plan.wave_count = wave_count;
  plan.wave_period = wave_period;
  plan.seed = seed;
  plan.vantages = std::move(vantages);
  plan.validate();
  return plan;
}

json to_json(const CrawlPlan& plan) {
  json products = json::array();
  for (const auto& p : plan.products) products.push_back({{"uri", p.uri}, {"selector", to_json(p.selector)}});
  return {{"id", plan.id},
          {"domain", plan.domain},
          {"products", products},
          {"wave_period_ms", plan.wave_period.count()},
          {"wave_count", plan.wave_count},
          {"vantages", plan.vantages},
          {"seed", plan.seed},
          {"cap", plan.cap},
          {"politeness_ms", plan.politeness.count()},
          {"max_parallel", plan.max_parallel},
          {"drop_after_failures", plan.drop_after_failures},
          {"agent_wait_ms", plan.agent_wait.count()},
          {"sync_window_ms", plan.sync_window.count()},
          {"fetch_timeout_ms", plan.fetch_timeout.count()}};
}

CrawlPlan plan_from_json(const json& j) {
  CrawlPlan plan;
  try {
    plan.id = j.at("id").get<std::string>();
    plan.domain = j.at("domain").get<std::string>();
    for (const auto& p : j.at("products")) {
      plan.products.push_back({p.at("uri").get<std::string>(), extract::selector_from_json(p.at("selector"))});
    }
    plan.wave_period = Millis(j.at("wave_period_ms").get<std::int64_t>());
    plan.wave_count = j.at("wave_count").get<int>();
    plan.vantages = j.at("vantages").get<std::vector<std::string>>();
    plan.seed = j.value("seed", std::uint64_t{0});
    plan.cap = j.value("cap", kDefaultProductCap);
    plan.politeness = Millis(j.value("politeness_ms", std::int64_t{2000}));
    plan.max_parallel = j.value("max_parallel", 4);
    plan.drop_after_failures = j.value("drop_after_failures", 3);
    plan.agent_wait = Millis(j.value("agent_wait_ms", std::int64_t{60000}));
    plan.sync_window = Millis(j.value("sync_window_ms", std::int64_t{5000}));
    plan.fetch_timeout = Millis(j.value("fetch_timeout_ms", std::int64_t{20000}));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

CrawlPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open plan " + path);
  try {
    return plan_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

void save_plan(const CrawlPlan& plan, const std::string& path) {
  std::ofstream out(path);
  out << to_json(plan).dump(2) << '\n';
  if (!out) throw InvalidArgument("cannot write plan " + path);
}

std::string to_string(WaveStatus s) {
  switch (s) {
    case WaveStatus::Pending:
      return "pending";
    case WaveStatus::Running:
      return "running";
    case WaveStatus::Completed:
      return "completed";
    case WaveStatus::Skipped:
      return "skipped";
  }
  return "pending";
}

WaveStatus wave_status_from_string(std::string_view text) {
  if (text == "pending") return WaveStatus::Pending;
  if (text == "running") return WaveStatus::Running;
  if (text == "completed") return WaveStatus::Completed;
  if (text == "skipped") return WaveStatus::Skipped;
  throw InvalidArgument("unknown wave status '" + std::string(text) + "'");
}

json to_json(const WaveReport& r) {
  json profiles = json::array();
  for (const auto& p : r.profiles) profiles.push_back(analytics::to_json(p));
  json j = {{"plan_id", r.plan_id},
            {"wave_index", r.wave_index},
            {"status", to_string(r.status)},
            {"started_at", format_timestamp(r.started_at)},
            {"finished_at", format_timestamp(r.finished_at)},
            {"profiles", profiles},
            {"failures", r.failures},
            {"observations", r.observations},
            {"dropped", r.dropped}};
  if (!r.skip_reason.empty()) j["skip_reason"] = r.skip_reason;
  return j;
}

}  // namespace sheriff::crawl
