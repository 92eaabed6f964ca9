#include "sheriff/analytics/location.hpp"
#include "sheriff/analytics/model.hpp"
#include "sheriff/analytics/profile.hpp"
#include "sheriff/analytics/summary.hpp"
#include "sheriff/crawl/plan.hpp"
#include "sheriff/crawl/scheduler.hpp"
#include "sheriff/extract/price_parser.hpp"
#include "sheriff/fx/gate.hpp"
#include "sheriff/fx/interval.hpp"
#include "sheriff/sim/pages.hpp"
#include "sheriff/sim/pricing.hpp"
#include "support/naive_extractor.hpp"
#include "support/temp_dir.hpp"
#include "support/testbed.hpp"

#include <httplib.h>
#include <json.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace sheriff;
using testsupport::TempDir;
using testsupport::Testbed;
using testsupport::VantageDef;

namespace {

// Tolerances.
constexpr double kMagnitudeTolerance = 0.001;   // relative, per-domain median vs injected
constexpr double kBandLow = 1.10;               // "vary by 10%-30%"
constexpr double kBandHigh = 1.30;
constexpr double kRuntimeTargetSeconds = 300.0;
constexpr std::size_t kGateFalsePositivesAllowed = 0;
constexpr double kFitRelativeTolerance = 1e-9;
constexpr double kNoisyClassAccuracy = 0.95;
constexpr double kNoiseAmplitude = 0.01;        // multiplicative, uniform in [-1%, +1%]
constexpr Millis kSyncWindow{5000};
constexpr int kSyncWaveTarget = 100;            // waves that must stay inside the window
const Rational kRateHalfWidth(1, 100);          // published window half-width

struct Outcome {
  bool pass = false;
  std::string detail;
};

double to_d(const Rational& r) { return r.convert_to<double>(); }

std::string fmt(double v, int digits = 6) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

net::CoordinatorOptions fast_coordinator() {
  net::CoordinatorOptions o;
  o.go_lead = Millis(20);
  o.ready_timeout = Millis(10000);
  o.result_grace = Millis(5000);
  return o;
}

// One vantage per simulator region, in region order.
std::vector<VantageDef> vantages_for(const std::vector<std::string>& regions) {
  std::vector<VantageDef> out;
  for (const auto& r : regions) {
    for (const auto& v : testsupport::default_vantages()) {
      if (v.region == r) out.push_back(v);
    }
  }
  return out;
}

std::vector<crawl::CatalogEntry> fleet_catalog(const sim::SimFleet& fleet, const sim::PricingPolicy& p) {
  std::vector<crawl::CatalogEntry> out;
  for (const auto& item : p.catalog) {
    out.push_back({fleet.product_uri(p.domain, item.id), sim::template_selector(p.template_id)});
  }
  return out;
}

fx::RateTable sim_rates(const std::vector<sim::PricingPolicy>& fleet) {
  return fx::RateTable::from_records(sim::published_windows(fleet, utc_day(now()), kRateHalfWidth), "USD");
}

// Crawls every policy of the testbed fleet concurrently, one plan each.
struct CrawlOutput {
  std::vector<analytics::ProductProfile> profiles;
  std::size_t observations = 0;
  std::size_t failures = 0;
  std::size_t skipped_waves = 0;
};

CrawlOutput crawl_fleet(Testbed& bed, const std::vector<sim::PricingPolicy>& policies, const fx::RateTable& rates,
                        int cap, int waves, Millis period, int max_parallel) {
  TempDir dir;
  net::ObservationStore store(dir.sub("obs"));
  net::SnapshotStore snaps(dir.sub("snap"));
  auto currencies = extract::CurrencyTable::builtin();
  crawl::CrawlRunner runner(bed.coordinator(), store, snaps, currencies, &rates, dir.sub("plans"));
  CrawlOutput out;
  std::mutex mu;
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    auto plan = crawl::make_plan(policies[i].domain, policies[i].domain, fleet_catalog(bed.fleet(), policies[i]), cap,
                                 waves, period, 1000 + i, bed.ids());
    plan.politeness = Millis(0);
    plan.max_parallel = max_parallel;
    plan.agent_wait = Millis(5000);
    threads.emplace_back([&, plan] {
      runner.run(plan, [&](const crawl::WaveReport& r) {
        std::lock_guard lock(mu);
        out.failures += r.failures;
        if (r.status == crawl::WaveStatus::Skipped) ++out.skipped_waves;
      });
    });
  }
  for (auto& t : threads) t.join();
  auto observations = store.replay(net::ReplayQuery{});
  out.observations = observations.size();
  out.profiles = analytics::build_profiles(std::move(observations), rates);
  return out;
}

// Injected-magnitude recovery.
Outcome magnitude() {
  sim::FleetSpec spec;  // 21 retailers, 6 regions, US-CHI pinned at 1, USD everywhere
  auto policies = sim::generate_fleet(spec);
  auto rates = sim_rates(policies);
  auto start = std::chrono::steady_clock::now();
  Testbed bed(policies, vantages_for(spec.regions), fast_coordinator());
  auto out = crawl_fleet(bed, policies, rates, crawl::kDefaultProductCap, 7, Millis(2000), 4);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Outcome o{true, ""};
  double worst = 0.0;
  double band_lo = 1e9;
  double band_hi = 0.0;
  std::string worst_domain;
  for (const auto& p : policies) {
    Rational lo = p.regions.begin()->second.multiplier;
    Rational hi = lo;
    for (const auto& [region, rule] : p.regions) {
      lo = std::min(lo, rule.multiplier);
      hi = std::max(hi, rule.multiplier);
    }
    double injected = to_d(hi / lo);
    auto summary = analytics::retailer_summary(p.domain, out.profiles);
    double median = to_d(summary.ratio_stats.median);
    double err = std::abs(median - injected) / injected;
    if (summary.n_distinct_products == 0) {
      o.pass = false;
      err = 1.0;
    }
    if (err > worst) {
      worst = err;
      worst_domain = p.domain;
    }
    band_lo = std::min(band_lo, median);
    band_hi = std::max(band_hi, median);
  }
  if (worst > kMagnitudeTolerance) o.pass = false;
  if (band_lo < kBandLow - kMagnitudeTolerance || band_hi > kBandHigh + kMagnitudeTolerance) o.pass = false;
  o.detail = std::to_string(policies.size()) + " domains, " + std::to_string(out.observations) + " observations, " +
             std::to_string(out.failures) + " failures, worst median error " + fmt(worst * 100, 4) + "% (" +
             worst_domain + "), band [" + fmt(band_lo, 4) + ", " + fmt(band_hi, 4) + "], " + fmt(seconds, 1) +
             " s (target " + fmt(kRuntimeTargetSeconds, 0) + " s)";
  if (seconds > kRuntimeTargetSeconds) o.detail += " over runtime target";
  return o;
}

std::string fetch_page(const sim::SimFleet& fleet, const std::string& domain, const std::string& product,
                       const std::string& region) {
  httplib::Client client("127.0.0.1", fleet.port(domain));
  httplib::Headers headers = {{"Host", domain}, {sim::kRegionHeader, region}};
  auto res = client.Get("/product/" + product, headers);
  if (!res || res->status != 200) throw std::runtime_error("fetch failed: " + domain + "/" + product);
  return res->body;
}

// Currency-gate soundness.
Outcome gate_soundness() {
  sim::FleetSpec spec;
  spec.retailers = 5;
  spec.seed = 22;
  spec.catalog_min = spec.catalog_max = 200;
  spec.regions = {"US", "FI", "UK", "BR", "CA", "CH", "SE"};
  spec.baseline_region.clear();
  for (const auto& r : spec.regions) spec.fixed_multipliers[r] = 1;
  spec.display_currency = {{"FI", "EUR"}, {"UK", "GBP"}, {"BR", "BRL"},
                           {"CA", "CAD"}, {"CH", "CHF"}, {"SE", "SEK"}};
  auto policies = sim::generate_fleet(spec);
  auto rates = sim_rates(policies);
  auto date = utc_day(now());
  auto currencies = extract::CurrencyTable::builtin();
  sim::SimFleet fleet(policies);
  fleet.start();

  std::size_t products = 0;
  std::size_t passes = 0;
  std::size_t localized = 0;
  for (const auto& p : policies) {
    auto sel = sim::template_selector(p.template_id);
    for (const auto& item : p.catalog) {
      std::vector<fx::RefInterval> intervals;
      std::set<std::string> codes;
      for (const auto& region : spec.regions) {
        auto page = fetch_page(fleet, p.domain, item.id, region);
        Money m = extract::extract_price(page, sel, currencies, p.domain);
        codes.insert(m.currency);
        intervals.push_back(fx::to_reference_interval(m, rates, date));
      }
      if (codes.size() == spec.regions.size()) ++localized;
      if (fx::currency_gate(intervals).passed) ++passes;
      ++products;
    }
  }
  fleet.stop();
  Outcome o;
  o.pass = products == 1000 && localized == products && passes <= kGateFalsePositivesAllowed;
  o.detail = std::to_string(products) + " products in " + std::to_string(spec.regions.size()) +
             " currencies, " + std::to_string(passes) + " gate passes";
  return o;
}

// Classification.
struct SyntheticDomain {
  analytics::VariationClass cls;
  Rational a;
  Rational b;
  std::vector<analytics::PricePair> pairs;
};

Rational cents(long long c) { return Rational(c, 100); }

std::vector<SyntheticDomain> synthetic_domains(std::mt19937_64& rng, bool noisy) {
  using VC = analytics::VariationClass;
  std::uniform_int_distribution<int> a_draw(1050, 2000);   // thousandths
  std::uniform_int_distribution<int> b_draw(100, 2000);    // cents
  std::uniform_int_distribution<long long> price(500, 10000);
  std::uniform_real_distribution<double> noise(-kNoiseAmplitude, kNoiseAmplitude);
  std::vector<SyntheticDomain> out;
  for (VC cls : {VC::Multiplicative, VC::Additive, VC::Mixed, VC::Flat}) {
    for (int d = 0; d < 50; ++d) {
      SyntheticDomain s{cls, Rational(1), Rational(0), {}};
      if (cls == VC::Multiplicative || cls == VC::Mixed) s.a = Rational(a_draw(rng), 1000);
      if (cls == VC::Additive || cls == VC::Mixed) s.b = cents(b_draw(rng));
      for (int k = 0; k < 100; ++k) {
        Rational p_min = cents(price(rng));
        Rational p_loc = s.a * p_min + s.b;
        if (noisy) {
          double v = to_d(p_loc) * (1.0 + noise(rng));
          p_loc = cents(std::llround(v * 100.0));
        }
        s.pairs.push_back({p_min, p_loc});
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

Outcome classification() {
  std::mt19937_64 rng(31);
  std::size_t exact_ok = 0;
  std::size_t exact_total = 0;
  double worst_rel = 0.0;
  for (const auto& s : synthetic_domains(rng, false)) {
    auto m = analytics::fit_variation_model("d", "l", s.pairs, {});
    double ra = std::abs(to_d(m.a_exact - s.a)) / to_d(s.a);
    double rb = std::abs(to_d(m.b_exact - s.b)) / std::max(1.0, std::abs(to_d(s.b)));
    worst_rel = std::max({worst_rel, ra, rb});
    if (m.cls == s.cls && ra <= kFitRelativeTolerance && rb <= kFitRelativeTolerance) ++exact_ok;
    ++exact_total;
  }
  std::size_t noisy_ok = 0;
  std::size_t noisy_total = 0;
  for (const auto& s : synthetic_domains(rng, true)) {
    auto m = analytics::fit_variation_model("d", "l", s.pairs, {});
    if (m.cls == s.cls) ++noisy_ok;
    ++noisy_total;
  }
  double noisy_rate = static_cast<double>(noisy_ok) / static_cast<double>(noisy_total);
  Outcome o;
  o.pass = exact_ok == exact_total && noisy_rate >= kNoisyClassAccuracy;
  o.detail = "noise-free " + std::to_string(exact_ok) + "/" + std::to_string(exact_total) +
             " (worst relative (a,b) error " + fmt(worst_rel, 12) + "), 1% noise " + std::to_string(noisy_ok) + "/" +
             std::to_string(noisy_total);
  return o;
}

// Extent metric.
Outcome extent() {
  sim::FleetSpec spec;
  spec.retailers = 4;
  spec.seed = 44;
  spec.catalog_min = 40;
  spec.catalog_max = 60;
  spec.display_currency = {{"FI", "EUR"}, {"DE", "EUR"}, {"UK", "GBP"}, {"BR", "BRL"}};
  for (int flat : {1, 3}) {
    for (const auto& r : spec.regions) spec.retailer_overrides[flat][r] = 1;
  }
  auto policies = sim::generate_fleet(spec);
  auto rates = sim_rates(policies);
  Testbed bed(policies, vantages_for(spec.regions), fast_coordinator());
  auto out = crawl_fleet(bed, policies, rates, 30, 2, Millis(500), 4);
  Outcome o{true, ""};
  for (std::size_t i = 0; i < policies.size(); ++i) {
    bool flat = i == 0 || i == 2;
    auto s = analytics::retailer_summary(policies[i].domain, out.profiles);
    double want = flat ? 0.0 : 1.0;
    if (s.n_products == 0 || s.variation_extent != want) o.pass = false;
    if (!o.detail.empty()) o.detail += ", ";
    o.detail += policies[i].domain + (flat ? " flat " : " discriminating ") + fmt(s.variation_extent, 3) + " over " +
                std::to_string(s.n_products) + " profiles";
  }
  return o;
}

// Synchrony.
Outcome synchrony() {
  std::mutex mu;
  std::map<std::string, std::vector<Timestamp>> true_starts;
  auto vantages = testsupport::default_vantages();
  auto tweak = [&](net::AgentOptions& o, std::size_t i) {
    o.clock_skew = Millis((static_cast<long long>(i % 5) - 2) * kSyncWindow.count() / 4);
    o.max_start_jitter = Millis(800);
    o.on_fetch_start = [&](const std::string& wave, Timestamp t) {
      std::lock_guard lock(mu);
      true_starts[wave].push_back(t);
    };
  };
  auto spec = testsupport::vantage_fleet_spec(1, 55);
  spec.catalog_min = spec.catalog_max = kSyncWaveTarget;
  auto policies = sim::generate_fleet(spec);
  net::CoordinatorOptions co = fast_coordinator();
  co.go_lead = Millis(100);
  Testbed bed(policies, vantages, co, tweak);
  const auto& p = policies.front();

  int inside = 0;
  long long worst_reported = 0;
  std::set<std::string> seen_before;
  for (int w = 0; w < kSyncWaveTarget; ++w) {
    net::FanOutTask task{bed.fleet().product_uri(p.domain, p.catalog[w].id), sim::template_selector(p.template_id),
                         std::nullopt, Millis(10000)};
    std::vector<net::FetchResult> results;
    try {
      results = bed.coordinator().fan_out(task, bed.ids(), kSyncWindow);
    } catch (const net::WaveQuorumFailure& e) {
      results = e.results();
    }
    Timestamp lo = Timestamp::max();
    Timestamp hi = Timestamp::min();
    std::size_t ok = 0;
    for (const auto& r : results) {
      if (r.status != net::FetchStatus::Ok) continue;
      ++ok;
      lo = std::min(lo, r.started_at);
      hi = std::max(hi, r.started_at);
    }
    long long spread = ok ? std::chrono::duration_cast<Millis>(hi - lo).count() : 0;
    worst_reported = std::max(worst_reported, spread);
    if (ok == vantages.size() && spread <= kSyncWindow.count()) ++inside;
  }
  long long worst_true = 0;
  {
    std::lock_guard lock(mu);
    for (const auto& [wave, ts] : true_starts) {
      auto [a, b] = std::minmax_element(ts.begin(), ts.end());
      worst_true = std::max<long long>(worst_true, std::chrono::duration_cast<Millis>(*b - *a).count());
    }
  }
  Outcome o;
  o.pass = inside == kSyncWaveTarget && worst_true <= kSyncWindow.count();
  o.detail = std::to_string(inside) + "/" + std::to_string(kSyncWaveTarget) + " waves with all " +
             std::to_string(vantages.size()) + " agents inside " + std::to_string(kSyncWindow.count()) +
             " ms; worst reported spread " + std::to_string(worst_reported) + " ms, worst true spread " +
             std::to_string(worst_true) + " ms (skew up to " + std::to_string(kSyncWindow.count() / 2) +
             " ms, jitter up to 800 ms)";
  return o;
}

// Quartile oracle.
Rational oracle_quantile(const std::vector<Rational>& sorted, const Rational& p) {
  Rational h = Rational(static_cast<long long>(sorted.size() - 1)) * p;
  auto lo = static_cast<std::size_t>(to_d(h));
  while (Rational(static_cast<long long>(lo)) > h) --lo;
  while (Rational(static_cast<long long>(lo + 1)) <= h) ++lo;
  Rational frac = h - Rational(static_cast<long long>(lo));
  if (lo + 1 >= sorted.size()) return sorted[lo];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Outcome quartile_oracle() {
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> log_size(0.0, std::log(10000.0));
  std::uniform_int_distribution<long long> low(100, 100000);
  std::size_t matched = 0;
  std::size_t total_values = 0;
  std::size_t max_size = 0;
  for (int t = 0; t < 1000; ++t) {
    std::size_t n = t < 10 ? static_cast<std::size_t>(t + 1)
                           : std::min<std::size_t>(10000, static_cast<std::size_t>(std::exp(log_size(rng))) + 1);
    if (t == 10) n = 10000;
    max_size = std::max(max_size, n);
    // Small pools force repeated values.
    std::size_t pool = (t % 3 == 0) ? 1 + rng() % 8 : n;
    std::vector<Rational> distinct;
    for (std::size_t i = 0; i < pool; ++i) {
      long long lo = low(rng);
      long long hi = lo + static_cast<long long>(rng() % static_cast<unsigned long long>(lo + 1));
      distinct.push_back(Rational(hi, lo));
    }
    std::vector<Rational> values;
    for (std::size_t i = 0; i < n; ++i) values.push_back(distinct[rng() % pool]);
    total_values += n;
    auto summary = analytics::retailer_summary_from_ratios("d", values);
    std::sort(values.begin(), values.end());
    const auto& s = summary.ratio_stats;
    if (s.min == values.front() && s.max == values.back() && s.q25 == oracle_quantile(values, Rational(1, 4)) &&
        s.median == oracle_quantile(values, Rational(1, 2)) && s.q75 == oracle_quantile(values, Rational(3, 4))) {
      ++matched;
    }
  }
  Outcome o;
  o.pass = matched == 1000;
  o.detail = std::to_string(matched) + "/1000 multisets exactly equal (" + std::to_string(total_values) +
             " values, largest " + std::to_string(max_size) + ")";
  return o;
}

// Extraction robustness.
Outcome extraction() {
  auto spec = testsupport::vantage_fleet_spec(3, 77);
  spec.catalog_min = spec.catalog_max = 50;
  auto policies = sim::generate_fleet(spec);
  auto currencies = extract::CurrencyTable::builtin();
  sim::SimFleet fleet(policies);
  fleet.start();
  const std::vector<std::string> regions = {"US-NY", "FI", "UK", "BR", "JP"};
  std::size_t total = 0;
  std::size_t selector_ok = 0;
  std::size_t naive_ok = 0;
  std::set<int> templates;
  for (const auto& p : policies) {
    templates.insert(p.template_id);
    auto sel = sim::template_selector(p.template_id);
    for (const auto& item : p.catalog) {
      for (const auto& region : regions) {
        auto page = fetch_page(fleet, p.domain, item.id, region);
        Money truth = sim::price_for(p, item.id, region, {});
        ++total;
        try {
          if (extract::extract_price(page, sel, currencies, p.domain) == truth) ++selector_ok;
        } catch (const Error&) {
        }
        auto naive = testsupport::naive_extract(page, currencies);
        if (naive && *naive == truth) ++naive_ok;
      }
    }
  }
  fleet.stop();
  Outcome o;
  o.pass = total > 0 && selector_ok == total && naive_ok < total;
  o.detail = std::to_string(templates.size()) + " templates, selector " + std::to_string(selector_ok) + "/" +
             std::to_string(total) + ", naive " + std::to_string(naive_ok) + "/" + std::to_string(total);
  return o;
}

// Location ranking.
Outcome location_ranking() {
  sim::FleetSpec spec;
  spec.seed = 88;
  spec.catalog_min = 40;
  spec.catalog_max = 60;
  spec.fixed_multipliers["FI"] = Rational(140, 100);
  spec.display_currency = {{"FI", "EUR"}, {"DE", "EUR"}, {"UK", "GBP"}, {"BR", "BRL"}};
  const std::set<int> exceptions = {4, 11, 17};
  for (int i : exceptions) spec.retailer_overrides[i]["FI"] = Rational(95, 100);
  auto policies = sim::generate_fleet(spec);
  auto rates = sim_rates(policies);
  auto vantages = vantages_for(spec.regions);
  std::string fi;
  for (const auto& v : vantages) {
    if (v.region == "FI") fi = v.id;
  }
  Testbed bed(policies, vantages, fast_coordinator());
  auto out = crawl_fleet(bed, policies, rates, 20, 1, Millis(1000), 4);
  auto report = analytics::location_ratios(out.profiles);
  std::set<std::string> flagged;
  for (const auto& n : report.never_cheapest) {
    if (n.location == fi) flagged.insert(n.domain);
  }
  std::set<std::string> expected;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    if (!exceptions.count(static_cast<int>(i + 1))) expected.insert(policies[i].domain);
  }
  Outcome o;
  o.pass = flagged == expected;
  o.detail = fi + " never-cheapest on " + std::to_string(flagged.size()) + "/" + std::to_string(policies.size()) +
             " domains, expected " + std::to_string(expected.size()) + " (" + std::to_string(exceptions.size()) +
             " exceptions)";
  return o;
}

// Store durability.
int free_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

// Child process whose stdout is read line by line on a thread.
class Child {
 public:
  explicit Child(std::vector<std::string> args) {
    int fds[2];
    if (::pipe(fds) != 0) throw std::runtime_error("pipe");
    pid_ = ::fork();
    if (pid_ == 0) {
      ::dup2(fds[1], STDOUT_FILENO);
      ::close(fds[0]);
      ::close(fds[1]);
      std::vector<char*> argv;
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      ::execv(argv[0], argv.data());
      ::_exit(127);
    }
    ::close(fds[1]);
    fd_ = fds[0];
    reader_ = std::thread([this] { read_loop(); });
  }

  ~Child() {
    kill();
    wait();
  }

  // Blocks until pred(lines) holds or the stream ends.
  bool wait_for(const std::function<bool(const std::vector<std::string>&)>& pred, Millis timeout) {
    std::unique_lock lock(mu_);
    return cv_.wait_for(lock, timeout, [&] { return pred(lines_) || eof_; }) && pred(lines_);
  }

  void kill() {
    if (pid_ > 0 && !reaped_) ::kill(pid_, SIGKILL);
  }

  void wait() {
    if (pid_ > 0 && !reaped_) {
      ::waitpid(pid_, nullptr, 0);
      reaped_ = true;
    }
    if (reader_.joinable()) reader_.join();
  }

  std::vector<std::string> lines() {
    std::lock_guard lock(mu_);
    return lines_;
  }

 private:
  void read_loop() {
    std::string buf;
    char chunk[4096];
    for (;;) {
      ssize_t n = ::read(fd_, chunk, sizeof chunk);
      if (n <= 0) break;
      buf.append(chunk, static_cast<std::size_t>(n));
      std::size_t pos;
      while ((pos = buf.find('\n')) != std::string::npos) {
        std::lock_guard lock(mu_);
        lines_.push_back(buf.substr(0, pos));
        buf.erase(0, pos + 1);
        cv_.notify_all();
      }
    }
    ::close(fd_);
    std::lock_guard lock(mu_);
    eof_ = true;
    cv_.notify_all();
  }

  pid_t pid_ = -1;
  int fd_ = -1;
  bool reaped_ = false;
  std::thread reader_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::string> lines_;
  bool eof_ = false;
};

std::size_t count_prefix(const std::vector<std::string>& lines, const std::string& prefix) {
  return static_cast<std::size_t>(
      std::count_if(lines.begin(), lines.end(), [&](const std::string& l) { return l.rfind(prefix, 0) == 0; }));
}

Outcome durability() {
  constexpr int kProducts = 60;
  constexpr std::size_t kKillAfter = 60;
  auto spec = testsupport::vantage_fleet_spec(1, 99);
  spec.catalog_min = spec.catalog_max = kProducts;
  auto policies = sim::generate_fleet(spec);
  auto vantages = testsupport::default_vantages();
  vantages.resize(3);

  TempDir dir;
  sim::SimFleet fleet(policies);
  fleet.start();
  std::vector<std::string> ids;
  for (const auto& v : vantages) ids.push_back(v.id);
  auto plan = crawl::make_plan("durable", policies.front().domain, fleet_catalog(fleet, policies.front()), kProducts,
                               1, Millis(120000), 9, ids);
  plan.politeness = Millis(0);
  plan.max_parallel = 2;
  plan.agent_wait = Millis(10000);
  std::string plan_path = dir.path() / "plan.json";
  crawl::save_plan(plan, plan_path);

  int port = free_port();
  std::vector<std::unique_ptr<net::Agent>> agents;
  for (std::size_t i = 0; i < vantages.size(); ++i) {
    net::AgentOptions o;
    o.id = vantages[i].id;
    o.country = vantages[i].country;
    o.city = vantages[i].city;
    o.coordinator_port = port;
    o.extra_headers = {{sim::kRegionHeader, vantages[i].region}};
    o.resolve = fleet.host_map();
    o.reconnect_delay = Millis(100);
    agents.push_back(std::make_unique<net::Agent>(std::move(o)));
    agents.back()->start();
  }

  std::vector<std::string> args = {SHERIFF_CLI,  "crawl",       "run",      "--plan", plan_path,
                                   "--data",     dir.str(),     "--agent-port", std::to_string(port),
                                   "--go-lead",  "20ms",        "--ack-log", "-"};
  std::set<std::string> acked;
  std::size_t ack_lines = 0;
  auto collect = [&](const std::vector<std::string>& lines) {
    for (const auto& l : lines) {
      if (l.rfind("ACK ", 0) == 0) {
        acked.insert(l.substr(4));
        ++ack_lines;
      }
    }
  };

  bool killed_mid = false;
  bool finished = false;
  {
    Child first(args);
    killed_mid = first.wait_for([&](const auto& l) { return count_prefix(l, "ACK ") >= kKillAfter; }, Millis(60000));
    first.kill();
    first.wait();
    collect(first.lines());
  }
  std::size_t acked_before = acked.size();
  {
    Child second(args);
    finished = second.wait_for([](const auto& l) { return count_prefix(l, "DONE") > 0; }, Millis(120000));
    second.kill();
    second.wait();
    collect(second.lines());
  }
  for (auto& a : agents) a->stop();
  fleet.stop();

  // Raw log: every line, including any the reader would dedup.
  std::ifstream log(dir.path() / "observations" / "observations.jsonl");
  std::map<std::string, int> occurrences;
  std::string line;
  std::size_t unreadable = 0;
  while (std::getline(log, line)) {
    if (line.empty()) continue;
    try {
      ++occurrences[observation_from_json(nlohmann::json::parse(line)).key()];
    } catch (const std::exception&) {
      ++unreadable;
    }
  }
  net::ObservationStore reopened((dir.path() / "observations").string());
  std::size_t missing = 0;
  for (const auto& k : acked) {
    if (!reopened.contains(k) || !occurrences.count(k)) ++missing;
  }
  std::size_t duplicated = 0;
  for (const auto& [k, n] : occurrences) {
    if (n > 1) ++duplicated;
  }
  std::size_t replayed = reopened.replay(net::ReplayQuery{}).size();

  Outcome o;
  o.pass = killed_mid && acked_before < static_cast<std::size_t>(kProducts) * vantages.size() && missing == 0 &&
           duplicated == 0 && ack_lines == acked.size() && acked.size() > acked_before;
  o.detail = "killed after " + std::to_string(acked_before) + " ACKs, " + std::to_string(acked.size()) +
             " ACKs in total, restart " + (finished ? "finished" : "did not finish") + ", " + std::to_string(missing) +
             " missing, " + std::to_string(duplicated) + " duplicated, " + std::to_string(replayed) +
             " replayed, " + std::to_string(unreadable) + " torn lines";
  return o;
}

struct Criterion {
  const char* name;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  ::signal(SIGPIPE, SIG_IGN);
  const std::vector<Criterion> criteria = {
      {"injected-magnitude-recovery", magnitude}, {"currency-gate-soundness", gate_soundness},
      {"classification", classification},         {"extent-metric", extent},
      {"synchrony", synchrony},                   {"quartile-oracle", quartile_oracle},
      {"extraction-robustness", extraction},      {"location-ranking", location_ranking},
      {"store-durability", durability}};
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.name)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
