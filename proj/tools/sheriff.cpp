#include "sheriff/analytics/location.hpp"
#include "sheriff/analytics/model.hpp"
#include "sheriff/analytics/profile.hpp"
#include "sheriff/analytics/report.hpp"
#include "sheriff/analytics/summary.hpp"
#include "sheriff/analytics/thirdparty.hpp"
#include "sheriff/core/uri.hpp"
#include "sheriff/crawl/catalog.hpp"
#include "sheriff/crawl/plan.hpp"
#include "sheriff/crawl/scheduler.hpp"
#include "sheriff/fx/ingest.hpp"
#include "sheriff/fx/rate_table.hpp"
#include "sheriff/net/agent.hpp"
#include "sheriff/net/api.hpp"
#include "sheriff/net/coordinator.hpp"
#include "sheriff/net/fetch.hpp"
#include "sheriff/net/service.hpp"
#include "sheriff/net/store.hpp"
#include "sheriff/sim/fleet.hpp"
#include "sheriff/sim/generator.hpp"
#include "sheriff/sim/pricing.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

namespace fs = std::filesystem;
using namespace sheriff;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void wait_for_signal() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::pair<std::string, std::string> split_pair(const std::string& text, char sep, const std::string& what) {
  auto pos = text.find(sep);
  if (pos == std::string::npos || pos == 0) throw InvalidArgument("malformed " + what + " '" + text + "'");
  std::string value = text.substr(pos + 1);
  while (!value.empty() && value.front() == ' ') value.erase(value.begin());
  return {text.substr(0, pos), value};
}

std::map<std::string, std::string> parse_resolve(const std::vector<std::string>& entries) {
  std::map<std::string, std::string> out;
  for (const auto& e : entries) out.insert(split_pair(e, '=', "--resolve"));
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_headers(const std::vector<std::string>& entries) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : entries) out.push_back(split_pair(e, ':', "--header"));
  return out;
}

extract::CurrencyTable load_currencies(const std::string& path) {
  return path.empty() ? extract::CurrencyTable::builtin() : extract::CurrencyTable::load_file(path);
}

std::unique_ptr<fx::RateTable> load_rates(const std::string& path, const std::string& reference) {
  if (path.empty()) return nullptr;
  return std::make_unique<fx::RateTable>(fx::RateTable::load_file(path, reference));
}

std::string store_dir(const std::string& data) { return (fs::path(data) / "observations").string(); }
std::string snapshot_dir(const std::string& data) { return (fs::path(data) / "snapshots").string(); }

struct Common {
  std::string currencies;
  std::string rates;
  std::string reference = "USD";
};

void add_common(CLI::App* app, Common& c, bool rates) {
  app->add_option("--currencies", c.currencies, "Currency table file (default: built-in)");
  if (rates) {
    app->add_option("--rates", c.rates, "Daily rate windows file");
    app->add_option("--reference", c.reference, "Reference currency");
  }
}

// serve -----------------------------------------------------------------------

struct ServeArgs {
  Common common;
  std::string bind = "127.0.0.1";
  int agent_port = 7000;
  int api_port = 8080;
  std::string data = "sheriff-data";
  int repetitions = 3;
  std::string spacing = "10m";
  std::string sync_window = "5s";
  std::string go_lead = "250ms";
  std::string fetch_timeout = "20s";
  int workers = 4;
  int rate_limit = 30;
  std::vector<std::string> vantages;
};

int run_serve(const ServeArgs& a) {
  auto currencies = load_currencies(a.common.currencies);
  auto rates = load_rates(a.common.rates, a.common.reference);
  net::ObservationStore store(store_dir(a.data));
  net::SnapshotStore snapshots(snapshot_dir(a.data));
  net::CoordinatorOptions co;
  co.bind_address = a.bind;
  co.port = a.agent_port;
  co.go_lead = parse_duration(a.go_lead);
  net::Coordinator coordinator(co);
  coordinator.start();
  net::ServiceOptions so;
  so.data_dir = a.data;
  so.repetitions = a.repetitions;
  so.repetition_spacing = parse_duration(a.spacing);
  so.sync_window = parse_duration(a.sync_window);
  so.fetch_timeout = parse_duration(a.fetch_timeout);
  so.workers = a.workers;
  so.rate_limit = a.rate_limit;
  so.vantages = a.vantages;
  net::CheckService service(coordinator, store, snapshots, currencies, rates.get(), so);
  service.start();
  net::RequesterApi api(service);
  api.start(a.bind, a.api_port);
  std::cout << "agents " << a.bind << ":" << coordinator.port() << "\n"
            << "api http://" << a.bind << ":" << api.port() << "/v1/checks" << std::endl;
  wait_for_signal();
  api.stop();
  service.stop();
  coordinator.stop();
  return 0;
}

// agent -----------------------------------------------------------------------

struct AgentArgs {
  std::string id;
  std::string country;
  std::string city;
  std::string coordinator = "127.0.0.1:7000";
  std::vector<std::string> headers;
  std::vector<std::string> resolve;
};

int run_agent(const AgentArgs& a) {
  net::AgentOptions o;
  o.id = a.id;
  o.country = a.country;
  o.city = a.city;
  auto [host, port] = split_pair(a.coordinator, ':', "--coordinator");
  o.coordinator_host = host;
  o.coordinator_port = std::stoi(port);
  o.extra_headers = parse_headers(a.headers);
  o.resolve = parse_resolve(a.resolve);
  net::Agent agent(o);
  agent.start();
  if (agent.wait_registered(Millis(10000))) {
    std::cout << "registered " << a.id << " offset " << agent.clock_offset().count() << "ms" << std::endl;
  } else {
    std::cerr << "not yet registered with " << a.coordinator << ", retrying" << std::endl;
  }
  wait_for_signal();
  agent.stop();
  return 0;
}

// replay ----------------------------------------------------------------------

struct QueryArgs {
  std::string data = "sheriff-data";
  std::string domain;
  std::string product;
  std::string vantage;
  std::string from;
  std::string to;
};

void add_query(CLI::App* app, QueryArgs& q) {
  app->add_option("--data", q.data, "Data directory");
  app->add_option("--domain", q.domain, "Retailer host");
  app->add_option("--product", q.product, "Product URI");
  app->add_option("--vantage", q.vantage, "Vantage id");
  app->add_option("--from", q.from, "Inclusive start (date or timestamp)");
  app->add_option("--to", q.to, "Exclusive end (date or timestamp)");
}

net::ReplayQuery make_query(const QueryArgs& a) {
  net::ReplayQuery q;
  if (!a.domain.empty()) q.domain = a.domain;
  if (!a.product.empty()) q.product_uri = a.product;
  if (!a.vantage.empty()) q.vantage = a.vantage;
  if (!a.from.empty()) q.from = parse_timestamp(a.from);
  if (!a.to.empty()) q.to = parse_timestamp(a.to);
  return q;
}

std::string log_path(const std::string& data) { return (fs::path(store_dir(data)) / "observations.jsonl").string(); }

int run_replay(const QueryArgs& a) {
  if (!fs::exists(log_path(a.data))) return 0;
  net::replay_file(log_path(a.data), make_query(a),
                   [](const PriceObservation& o) { std::cout << to_json(o).dump() << '\n'; });
  std::cout.flush();
  return 0;
}

// crawl -----------------------------------------------------------------------

struct CrawlPlanArgs {
  std::string id;
  std::string domain;
  std::string catalog_file;
  int cap = crawl::kDefaultProductCap;
  int waves = 7;
  std::string period = "24h";
  std::uint64_t seed = 0;
  std::vector<std::string> vantages;
  std::string politeness = "2s";
  int max_parallel = 4;
  std::string agent_wait = "60s";
  std::string out;
};

int run_crawl_plan(const CrawlPlanArgs& a) {
  auto catalog = crawl::read_catalog_file(a.catalog_file);
  std::vector<crawl::CatalogEntry> own;
  for (auto& e : catalog) {
    if (parse_uri(e.uri).host == a.domain) own.push_back(std::move(e));
  }
  auto plan = crawl::make_plan(a.id.empty() ? a.domain : a.id, a.domain, own, a.cap, a.waves,
                               parse_duration(a.period), a.seed, a.vantages);
  plan.politeness = parse_duration(a.politeness);
  plan.max_parallel = a.max_parallel;
  plan.agent_wait = parse_duration(a.agent_wait);
  plan.validate();
  if (a.out.empty() || a.out == "-") {
    std::cout << crawl::to_json(plan).dump(2) << std::endl;
  } else {
    crawl::save_plan(plan, a.out);
    std::cout << "plan " << plan.id << ": " << plan.products.size() << " products, " << plan.wave_count
              << " waves" << std::endl;
  }
  return 0;
}

struct CrawlIngestArgs {
  std::vector<std::string> listings;
  std::string pattern = ".*/product/[^/?#]+";
  std::string selector;
  std::vector<std::string> headers;
  std::vector<std::string> resolve;
  std::string out;
};

int run_crawl_ingest(const CrawlIngestArgs& a) {
  net::FetchOptions fo;
  fo.extra_headers = parse_headers(a.headers);
  fo.resolve = parse_resolve(a.resolve);
  auto probe = extract::PriceSelector::dom_path("body");
  std::vector<std::pair<std::string, std::string>> pages;
  for (const auto& uri : a.listings) {
    auto r = net::agent_fetch(uri, probe, std::nullopt, fo);
    if (!r.page) throw InvalidArgument("cannot fetch listing " + uri + ": " + r.error);
    pages.emplace_back(uri, *r.page);
  }
  auto catalog = crawl::catalog_ingest(pages, a.pattern, crawl::selector_from_text(a.selector));
  if (a.out.empty() || a.out == "-") {
    crawl::write_catalog(std::cout, catalog);
  } else {
    std::ofstream out(a.out);
    crawl::write_catalog(out, catalog);
    std::cerr << catalog.size() << " products" << std::endl;
  }
  return 0;
}

struct CrawlRunArgs {
  Common common;
  std::vector<std::string> plans;
  std::string data = "sheriff-data";
  std::string bind = "127.0.0.1";
  int agent_port = 7000;
  std::string go_lead = "250ms";
  std::string ack_log;
  bool sync = false;
};

int run_crawl_run(const CrawlRunArgs& a) {
  auto currencies = load_currencies(a.common.currencies);
  auto rates = load_rates(a.common.rates, a.common.reference);
  std::vector<crawl::CrawlPlan> plans;
  for (const auto& p : a.plans) plans.push_back(crawl::load_plan(p));

  net::ObservationStore store(store_dir(a.data), net::StoreOptions{a.sync});
  net::SnapshotStore snapshots(snapshot_dir(a.data));
  std::mutex out_mu;
  std::unique_ptr<std::ofstream> ack_file;
  std::ostream* ack = nullptr;
  if (a.ack_log == "-") {
    ack = &std::cout;
  } else if (!a.ack_log.empty()) {
    ack_file = std::make_unique<std::ofstream>(a.ack_log, std::ios::app);
    ack = ack_file.get();
  }
  if (ack) {
    store.set_append_hook([&](const PriceObservation& o) {
      std::lock_guard lock(out_mu);
      *ack << "ACK " << o.key() << std::endl;
    });
  }

  net::CoordinatorOptions co;
  co.bind_address = a.bind;
  co.port = a.agent_port;
  co.go_lead = parse_duration(a.go_lead);
  net::Coordinator coordinator(co);
  coordinator.start();
  {
    std::lock_guard lock(out_mu);
    std::cout << "LISTENING " << coordinator.port() << std::endl;
  }

  crawl::CrawlRunner runner(coordinator, store, snapshots, currencies, rates.get(),
                            (fs::path(a.data) / "plans").string());
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([&] {
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    runner.stop();
  });
  std::vector<std::thread> threads;
  for (const auto& plan : plans) {
    threads.emplace_back([&, plan] {
      runner.run(plan, [&](const crawl::WaveReport& r) {
        std::lock_guard lock(out_mu);
        std::cout << "WAVE " << r.plan_id << " " << r.wave_index << " " << crawl::to_string(r.status) << " "
                  << r.observations << " observations";
        if (!r.skip_reason.empty()) std::cout << " (" << r.skip_reason << ")";
        std::cout << std::endl;
      });
    });
  }
  for (auto& t : threads) t.join();
  g_stop = true;
  watcher.join();
  coordinator.stop();
  std::cout << "DONE " << store.size() << std::endl;
  return 0;
}

// analyze ---------------------------------------------------------------------

struct AnalyzeArgs {
  Common common;
  QueryArgs query;
  std::string location;
  std::vector<std::string> locations;
  std::string format = "json";
};

std::vector<analytics::ProductProfile> load_profiles(const AnalyzeArgs& a, const fx::RateTable& table) {
  std::vector<analytics::ProductProfile> profiles;
  analytics::ProfileBuilder builder(table, [&](analytics::ProductProfile p) { profiles.push_back(std::move(p)); });
  if (fs::exists(log_path(a.query.data))) {
    net::replay_file(log_path(a.query.data), make_query(a.query),
                     [&](const PriceObservation& o) { builder.add(o); });
  }
  builder.finish();
  if (builder.skipped_groups() > 0) std::cerr << builder.skipped_groups() << " waves skipped" << std::endl;
  return profiles;
}

std::map<std::string, std::vector<analytics::ProductProfile>> by_domain(
    std::vector<analytics::ProductProfile> profiles) {
  std::map<std::string, std::vector<analytics::ProductProfile>> out;
  for (auto& p : profiles) out[p.domain].push_back(std::move(p));
  return out;
}

const fx::RateTable& require_rates(const std::unique_ptr<fx::RateTable>& rates) {
  if (!rates) throw InvalidArgument("--rates is required");
  return *rates;
}

int run_analyze(const std::string& kind, const AnalyzeArgs& a) {
  if (kind == "thirdparty") {
    std::map<std::string, std::set<std::string>> refs;
    if (fs::exists(log_path(a.query.data))) {
      net::replay_file(log_path(a.query.data), make_query(a.query),
                       [&](const PriceObservation& o) { refs[o.domain].insert(o.snapshot_ref); });
    }
    net::SnapshotStore snapshots(snapshot_dir(a.query.data));
    std::map<std::string, std::vector<std::string>> pages;
    for (const auto& [domain, set] : refs) {
      auto& list = pages[domain];
      for (const auto& ref : set) {
        if (auto page = snapshots.get(ref)) list.push_back(std::move(*page));
      }
    }
    std::cout << analytics::report_envelope("thirdparty", analytics::to_json(analytics::third_party_scan(pages))).dump(2)
              << std::endl;
    return 0;
  }

  auto rates = load_rates(a.common.rates, a.common.reference);
  const auto& table = require_rates(rates);
  auto profiles = load_profiles(a, table);

  if (kind == "summary") {
    json retailers = json::array();
    for (const auto& [domain, ps] : by_domain(profiles)) {
      retailers.push_back(analytics::to_json(analytics::retailer_summary(domain, ps)));
    }
    auto points = analytics::ratio_vs_price(profiles);
    if (a.format == "csv") {
      analytics::write_ratio_points_csv(std::cout, points);
      return 0;
    }
    json body = {{"retailers", retailers},
                 {"bands", analytics::to_json(analytics::ratio_bands(points, analytics::decade_edges(0, 5)))}};
    std::cout << analytics::report_envelope("summary", body).dump(2) << std::endl;
  } else if (kind == "fit") {
    json models = json::array();
    json skipped = json::array();
    for (const auto& [domain, ps] : by_domain(profiles)) {
      std::set<std::string> locations;
      if (!a.location.empty()) {
        locations.insert(a.location);
      } else {
        for (const auto& p : ps) {
          for (const auto& o : p.observations) locations.insert(o.vantage);
        }
      }
      for (const auto& loc : locations) {
        auto pairs = analytics::location_pairs(ps, loc);
        try {
          auto m = analytics::fit_variation_model(domain, loc, pairs);
          models.push_back(analytics::to_json(m));
          if (a.format == "csv") analytics::write_pairs_csv(std::cout, domain, loc, pairs);
        } catch (const analytics::InsufficientPairs& e) {
          skipped.push_back({{"domain", domain}, {"location", loc}, {"reason", e.what()}});
        }
      }
    }
    if (a.format != "csv") {
      std::cout << analytics::report_envelope("fit", {{"models", models}, {"skipped", skipped}}).dump(2) << std::endl;
    }
  } else if (kind == "locations") {
    auto report = analytics::location_ratios(profiles);
    if (a.format == "csv") {
      analytics::write_location_ratios_csv(std::cout, report.ratios);
    } else {
      std::cout << analytics::report_envelope("locations", analytics::to_json(report)).dump(2) << std::endl;
    }
  } else if (kind == "grid") {
    if (a.query.domain.empty() || a.locations.size() < 2) {
      throw InvalidArgument("grid needs --domain and at least two --locations");
    }
    auto grid = analytics::pairwise_grid(a.query.domain, a.locations, profiles);
    if (a.format == "csv") {
      analytics::write_grid_csv(std::cout, grid);
    } else {
      std::cout << analytics::report_envelope("grid", analytics::to_json(grid)).dump(2) << std::endl;
    }
  }
  return 0;
}

// rates -----------------------------------------------------------------------

int run_rates_verify(const std::string& file, const std::string& reference) {
  auto table = fx::RateTable::load_file(file, reference);
  std::set<std::string> currencies;
  std::set<std::string> dates;
  for (const auto& r : table.records()) {
    currencies.insert(r.base);
    currencies.insert(r.quote);
    dates.insert(format_date(r.date));
  }
  std::cout << table.size() << " records, " << dates.size() << " days, " << currencies.size() << " currencies";
  if (!dates.empty()) std::cout << " (" << *dates.begin() << " .. " << *dates.rbegin() << ")";
  std::cout << std::endl;
  return 0;
}

int run_rates_ingest(const std::string& service, const std::vector<std::string>& pairs_text,
                     const std::string& date, const std::string& out) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : pairs_text) pairs.push_back(split_pair(p, '/', "pair"));
  fx::QuoteClient client(service);
  auto windows = client.snapshot(pairs, date.empty() ? utc_day(now()) : parse_date(date));
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out.empty() && out != "-") {
    file.open(out, std::ios::app);
    os = &file;
  }
  for (const auto& w : windows) *os << fx::format_rate_record(w) << '\n';
  return 0;
}

// sim -------------------------------------------------------------------------

int run_sim_generate(const sim::FleetSpec& spec, const std::string& out) {
  auto fleet = sim::generate_fleet(spec);
  sim::save_policy_dir(fleet, out);
  std::cout << fleet.size() << " policies written to " << out << std::endl;
  return 0;
}

int run_sim_serve(const std::string& dir, const std::string& bind, int base_port) {
  sim::FleetOptions fo;
  fo.bind_address = bind;
  fo.base_port = base_port;
  sim::SimFleet fleet(sim::load_policy_dir(dir), fo);
  fleet.start();
  for (const auto& p : fleet.policies()) {
    std::cout << p.domain << " " << bind << ":" << fleet.port(p.domain) << std::endl;
  }
  wait_for_signal();
  fleet.stop();
  return 0;
}

int run_sim_rates(const std::string& dir, const std::string& date, const std::string& half_width,
                  const std::string& out) {
  auto windows = sim::published_windows(sim::load_policy_dir(dir), date.empty() ? utc_day(now()) : parse_date(date),
                                        parse_rational(half_width));
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out.empty() && out != "-") {
    file.open(out);
    os = &file;
  }
  for (const auto& w : windows) *os << fx::format_rate_record(w) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Price discrimination detection: coordinator, agents, crawler, analysis and simulator"};
  app.require_subcommand(1);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the coordinator and the requester API");
  add_common(serve_cmd, serve.common, true);
  serve_cmd->add_option("--bind", serve.bind);
  serve_cmd->add_option("--agent-port", serve.agent_port, "Agent protocol port (0 = ephemeral)");
  serve_cmd->add_option("--api-port", serve.api_port, "Requester API port (0 = ephemeral)");
  serve_cmd->add_option("--data", serve.data, "Data directory");
  serve_cmd->add_option("--repetitions", serve.repetitions);
  serve_cmd->add_option("--spacing", serve.spacing, "Delay between repetitions");
  serve_cmd->add_option("--sync-window", serve.sync_window);
  serve_cmd->add_option("--go-lead", serve.go_lead);
  serve_cmd->add_option("--fetch-timeout", serve.fetch_timeout);
  serve_cmd->add_option("--workers", serve.workers);
  serve_cmd->add_option("--rate-limit", serve.rate_limit, "Checks per requester per minute");
  serve_cmd->add_option("--vantages", serve.vantages, "Vantage ids (default: all registered)")->delimiter(',');

  AgentArgs agent;
  auto* agent_cmd = app.add_subcommand("agent", "Run a vantage-point agent");
  agent_cmd->add_option("--id", agent.id)->required();
  agent_cmd->add_option("--country", agent.country)->required();
  agent_cmd->add_option("--city", agent.city);
  agent_cmd->add_option("--coordinator", agent.coordinator, "host:port");
  agent_cmd->add_option("--header", agent.headers, "Extra request header 'Name: value'");
  agent_cmd->add_option("--resolve", agent.resolve, "host=address override");

  QueryArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Stream stored observations as JSON Lines");
  add_query(replay_cmd, replay);

  auto* crawl_cmd = app.add_subcommand("crawl", "Systematic crawls");
  crawl_cmd->require_subcommand(1);
  CrawlPlanArgs plan;
  auto* plan_cmd = crawl_cmd->add_subcommand("plan", "Sample a catalog into a crawl plan");
  plan_cmd->add_option("--id", plan.id, "Plan id (default: domain)");
  plan_cmd->add_option("--domain", plan.domain)->required();
  plan_cmd->add_option("--catalog-file", plan.catalog_file)->required();
  plan_cmd->add_option("--cap", plan.cap);
  plan_cmd->add_option("--waves", plan.waves);
  plan_cmd->add_option("--period", plan.period);
  plan_cmd->add_option("--seed", plan.seed);
  plan_cmd->add_option("--vantages", plan.vantages)->delimiter(',')->required();
  plan_cmd->add_option("--politeness", plan.politeness);
  plan_cmd->add_option("--max-parallel", plan.max_parallel);
  plan_cmd->add_option("--agent-wait", plan.agent_wait);
  plan_cmd->add_option("--out", plan.out);
  CrawlIngestArgs ingest;
  auto* ingest_cmd = crawl_cmd->add_subcommand("ingest", "Build a catalog from listing pages");
  ingest_cmd->add_option("--listing", ingest.listings)->required();
  ingest_cmd->add_option("--pattern", ingest.pattern, "Regex a product URI must match");
  ingest_cmd->add_option("--selector", ingest.selector, "Retailer selector (dom:... or anchor:N:...)")->required();
  ingest_cmd->add_option("--header", ingest.headers);
  ingest_cmd->add_option("--resolve", ingest.resolve);
  ingest_cmd->add_option("--out", ingest.out);
  CrawlRunArgs run;
  auto* run_cmd = crawl_cmd->add_subcommand("run", "Execute crawl plans");
  add_common(run_cmd, run.common, true);
  run_cmd->add_option("--plan", run.plans)->required();
  run_cmd->add_option("--data", run.data);
  run_cmd->add_option("--bind", run.bind);
  run_cmd->add_option("--agent-port", run.agent_port);
  run_cmd->add_option("--go-lead", run.go_lead);
  run_cmd->add_option("--ack-log", run.ack_log, "Print 'ACK <key>' per stored observation ('-' = stdout)");
  run_cmd->add_flag("--sync", run.sync, "fsync every append");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Variation analytics over the store");
  analyze_cmd->require_subcommand(1);
  std::string analyze_kind;
  for (const char* kind : {"summary", "fit", "grid", "locations", "thirdparty"}) {
    auto* sub = analyze_cmd->add_subcommand(kind);
    add_common(sub, analyze.common, true);
    add_query(sub, analyze.query);
    sub->add_option("--format", analyze.format, "json or csv");
    if (std::string(kind) == "fit") sub->add_option("--location", analyze.location);
    if (std::string(kind) == "grid") sub->add_option("--locations", analyze.locations)->delimiter(',');
    sub->callback([&analyze_kind, kind] { analyze_kind = kind; });
  }

  auto* rates_cmd = app.add_subcommand("rates", "Exchange-rate windows");
  rates_cmd->require_subcommand(1);
  std::string rates_file;
  std::string rates_reference = "USD";
  auto* verify_cmd = rates_cmd->add_subcommand("verify", "Check a rate file");
  verify_cmd->add_option("--file", rates_file)->required();
  verify_cmd->add_option("--reference", rates_reference);
  std::string quote_service;
  std::vector<std::string> quote_pairs;
  std::string quote_date;
  std::string quote_out;
  auto* rates_ingest_cmd = rates_cmd->add_subcommand("ingest", "Fetch daily windows from a quote service");
  rates_ingest_cmd->add_option("--service", quote_service)->required();
  rates_ingest_cmd->add_option("--pairs", quote_pairs, "BASE/QUOTE list")->delimiter(',')->required();
  rates_ingest_cmd->add_option("--date", quote_date);
  rates_ingest_cmd->add_option("--out", quote_out);

  auto* sim_cmd = app.add_subcommand("sim", "Retailer simulator");
  sim_cmd->require_subcommand(1);
  sim::FleetSpec spec;
  std::string sim_dir = "sim-policies";
  std::string sim_bind = "127.0.0.1";
  int sim_base_port = 0;
  std::string sim_date;
  std::string sim_half_width = "0.01";
  std::string sim_out;
  auto* gen_cmd = sim_cmd->add_subcommand("generate", "Write a generated fleet of policies");
  gen_cmd->add_option("--out", sim_dir);
  gen_cmd->add_option("--retailers", spec.retailers);
  gen_cmd->add_option("--seed", spec.seed);
  gen_cmd->add_option("--baseline", spec.baseline_region);
  auto* sim_serve_cmd = sim_cmd->add_subcommand("serve", "Serve a policy directory");
  sim_serve_cmd->add_option("--policies", sim_dir);
  sim_serve_cmd->add_option("--bind", sim_bind);
  sim_serve_cmd->add_option("--base-port", sim_base_port, "First port (0 = ephemeral)");
  auto* sim_rates_cmd = sim_cmd->add_subcommand("rates", "Publish rate windows matching the fleet");
  sim_rates_cmd->add_option("--policies", sim_dir);
  sim_rates_cmd->add_option("--date", sim_date);
  sim_rates_cmd->add_option("--half-width", sim_half_width, "Relative half-width of each window");
  sim_rates_cmd->add_option("--out", sim_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve_cmd->parsed()) return run_serve(serve);
    if (agent_cmd->parsed()) return run_agent(agent);
    if (replay_cmd->parsed()) return run_replay(replay);
    if (plan_cmd->parsed()) return run_crawl_plan(plan);
    if (ingest_cmd->parsed()) return run_crawl_ingest(ingest);
    if (run_cmd->parsed()) return run_crawl_run(run);
    if (analyze_cmd->parsed()) return run_analyze(analyze_kind, analyze);
    if (verify_cmd->parsed()) return run_rates_verify(rates_file, rates_reference);
    if (rates_ingest_cmd->parsed()) return run_rates_ingest(quote_service, quote_pairs, quote_date, quote_out);
    if (gen_cmd->parsed()) return run_sim_generate(spec, sim_dir);
    if (sim_serve_cmd->parsed()) return run_sim_serve(sim_dir, sim_bind, sim_base_port);
    if (sim_rates_cmd->parsed()) return run_sim_rates(sim_dir, sim_date, sim_half_width, sim_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
