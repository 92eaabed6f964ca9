#pragma once

#include "sheriff/analytics/profile.hpp"
#include "sheriff/core/time.hpp"
#include "sheriff/crawl/catalog.hpp"

#include <json.hpp>

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace sheriff::crawl {

inline constexpr int kDefaultProductCap = 100;

struct CrawlPlan {
  std::string id;
  std::string domain;
  std::vector<CatalogEntry> products;
  Millis wave_period{std::chrono::hours(24)};
  int wave_count = 7;
  std::vector<std::string> vantages;
  std::uint64_t seed = 0;
  int cap = kDefaultProductCap;

  // Minimum spacing between consecutive product fan-outs of this plan.
  Millis politeness{2000};
  int max_parallel = 4;
  int drop_after_failures = 3;
  // How long a wave waits for every plan vantage to be registered.
  Millis agent_wait{60000};
  Millis sync_window{5000};
  Millis fetch_timeout{20000};

  // Throws InvalidArgument.
  void validate() const;
};

// Samples the catalog and fills in a plan with defaults for the rest.
CrawlPlan make_plan(std::string id, std::string domain, const std::vector<CatalogEntry>& catalog, int cap,
                    int wave_count, Millis wave_period, std::uint64_t seed, std::vector<std::string> vantages);

nlohmann::json to_json(const CrawlPlan& plan);
CrawlPlan plan_from_json(const nlohmann::json& j);
CrawlPlan load_plan(const std::string& path);
void save_plan(const CrawlPlan& plan, const std::string& path);

enum class WaveStatus { Pending, Running, Completed, Skipped };

std::string to_string(WaveStatus s);
WaveStatus wave_status_from_string(std::string_view text);

struct WaveReport {
  std::string plan_id;
  int wave_index = 0;
  WaveStatus status = WaveStatus::Pending;
  std::string skip_reason;
  Timestamp started_at{};
  Timestamp finished_at{};
  std::vector<analytics::ProductProfile> profiles;
  // (product, vantage) pairs that yielded no price.
  int failures = 0;
  std::size_t observations = 0;
  std::vector<std::string> dropped;  // products dropped after this wave
};

nlohmann::json to_json(const WaveReport& report);

}  // namespace sheriff::crawl
