#include "sheriff/fx/ingest.hpp"

#include <httplib.h>
#include <json.hpp>

namespace sheriff::fx {

QuoteClient::QuoteClient(std::string base_url, std::string path)
    : base_url_(std::move(base_url)), path_(std::move(path)) {}

RateWindow QuoteClient::daily_window(const std::string& base, const std::string& quote, Date date) const {
  httplib::Client client(base_url_);
  client.set_connection_timeout(5);
  client.set_read_timeout(10);
  httplib::Params params{{"base", base}, {"quote", quote}, {"date", format_date(date)}};
  auto res = client.Get(path_, params, httplib::Headers{});
  if (!res) throw QuoteServiceError("quote service unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw QuoteServiceError("quote service returned HTTP " + std::to_string(res->status));
  }
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw QuoteServiceError(std::string("quote service sent invalid JSON: ") + e.what());
  }
  const auto& quotes = body.value("quotes", nlohmann::json::array());
  if (!quotes.is_array() || quotes.empty()) {
    throw QuoteServiceError("no quotes for " + base + "/" + quote + " on " + format_date(date));
  }
  std::optional<Rational> low, high;
  for (const auto& q : quotes) {
    Rational r = q.is_string() ? parse_rational(q.get<std::string>()) : parse_rational(q.dump());
    if (!(r > 0)) throw QuoteServiceError("non-positive quote for " + base + "/" + quote);
    if (!low || r < *low) low = r;
    if (!high || r > *high) high = r;
  }
  return RateWindow{date, base, quote, *low, *high};
}

std::vector<RateWindow> QuoteClient::snapshot(const std::vector<std::pair<std::string, std::string>>& pairs,
                                              Date date) const {
  std::vector<RateWindow> out;
  out.reserve(pairs.size());
  for (const auto& [base, quote] : pairs) out.push_back(daily_window(base, quote, date));
  return out;
}

RateRefresher::RateRefresher(QuoteClient client, std::vector<std::pair<std::string, std::string>> pairs,
                             std::string reference, Millis period, Publish on_publish)
    : client_(std::move(client)),
      pairs_(std::move(pairs)),
      reference_(std::move(reference)),
      period_(period),
      on_publish_(std::move(on_publish)) {}

RateRefresher::~RateRefresher() { stop(); }

void RateRefresher::start() {
  std::lock_guard lock(mu_);
  if (worker_.joinable()) return;
  stopping_ = false;
  worker_ = std::thread([this] {
    std::unique_lock lock(mu_);
    while (!stopping_) {
      lock.unlock();
      refresh_once(utc_day(now()));
      lock.lock();
      cv_.wait_for(lock, period_, [this] { return stopping_; });
    }
  });
}

void RateRefresher::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

bool RateRefresher::refresh_once(Date date) {
  std::vector<RateWindow> fresh;
  try {
    fresh = client_.snapshot(pairs_, date);
  } catch (const Error&) {
    return false;
  }
  std::lock_guard lock(mu_);
  // A later snapshot of the same day replaces the earlier one.
  std::erase_if(accumulated_, [&](const RateWindow& w) { return w.date == date; });
  accumulated_.insert(accumulated_.end(), fresh.begin(), fresh.end());
  table_ = std::make_shared<const RateTable>(RateTable::from_records(accumulated_, reference_));
  if (on_publish_) on_publish_(fresh);
  return true;
}

std::shared_ptr<const RateTable> RateRefresher::current() const {
  std::lock_guard lock(mu_);
  return table_;
}

}  // namespace sheriff::fx
