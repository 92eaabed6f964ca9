#pragma once

#include "sheriff/core/errors.hpp"
#include "sheriff/fx/rate_table.hpp"

#include <atomic>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace sheriff::fx {

class QuoteServiceError : public Error {
 public:
  using Error::Error;
};

// Pulls intraday quotes for a currency pair and day from an HTTP service
//
//   GET <path>?base=EUR&quote=USD&date=2013-02-01
//   -> {"quotes": ["1.3012", "1.3188", ...]}
//
// and reduces them to the day's low/high window. Quotes may be strings or
// JSON numbers; strings are preferred since they stay exact.
class QuoteClient {
 public:
  QuoteClient(std::string base_url, std::string path = "/quotes");

  RateWindow daily_window(const std::string& base, const std::string& quote, Date date) const;

  // One window per pair, in the rate record format's order.
  std::vector<RateWindow> snapshot(const std::vector<std::pair<std::string, std::string>>& pairs,
                                   Date date) const;

 private:
  std::string base_url_;
  std::string path_;
};

// Periodically snapshots the day's windows and publishes a fresh immutable
// table. Readers grab the current table with `current()`.
class RateRefresher {
 public:
  using Publish = std::function<void(const std::vector<RateWindow>&)>;

  RateRefresher(QuoteClient client, std::vector<std::pair<std::string, std::string>> pairs,
                std::string reference, Millis period, Publish on_publish = {});
  ~RateRefresher();

  RateRefresher(const RateRefresher&) = delete;
  RateRefresher& operator=(const RateRefresher&) = delete;

  void start();
  void stop();
  // Runs one snapshot synchronously; returns false when the service failed.
  bool refresh_once(Date date);

  std::shared_ptr<const RateTable> current() const;

 private:
  QuoteClient client_;
  std::vector<std::pair<std::string, std::string>> pairs_;
  std::string reference_;
  Millis period_;
  Publish on_publish_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::shared_ptr<const RateTable> table_;
  std::vector<RateWindow> accumulated_;
  std::thread worker_;
};

}  // namespace sheriff::fx
