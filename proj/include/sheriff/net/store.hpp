#pragma once

#include "sheriff/core/errors.hpp"
#include "sheriff/core/observation.hpp"

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace sheriff::net {

class StoreError : public Error {
 public:
  using Error::Error;
};

std::string sha256_hex(std::string_view data);

// Page bodies keyed by their SHA-256. Identical pages are stored once.
class SnapshotStore {
 public:
  explicit SnapshotStore(std::string dir);

  // Durable (written to a temporary file, synced, renamed) before it returns.
  std::string put(std::string_view body);
  std::optional<std::string> get(const std::string& ref) const;
  bool contains(const std::string& ref) const;
  const std::string& dir() const { return dir_; }

 private:
  std::string path_for(const std::string& ref) const;
  std::string dir_;
};

struct ReplayQuery {
  std::optional<std::string> domain;
  std::optional<std::string> product_uri;
  std::optional<std::string> vantage;
  std::optional<Timestamp> from;  // inclusive
  std::optional<Timestamp> to;    // exclusive

  bool matches(const PriceObservation& obs) const;
};

struct StoreOptions {
  // fsync after every append.
  bool sync = false;
};

// Append-only JSON Lines log of observations. A torn final line left by a
// crash is truncated on open; keys (check, repetition, vantage, persona)
// are unique, so re-appending after a restart is harmless.
class ObservationStore {
 public:
  using AppendHook = std::function<void(const PriceObservation&)>;

  explicit ObservationStore(std::string dir, StoreOptions options = {});
  ~ObservationStore();

  ObservationStore(const ObservationStore&) = delete;
  ObservationStore& operator=(const ObservationStore&) = delete;

  // False when the key is already stored. The hook runs after the line is
  // written, under the store's lock, so hooks observe the total order.
  bool append(const PriceObservation& obs);
  void set_append_hook(AppendHook hook);

  bool contains(const std::string& key) const;
  std::size_t size() const;
  const std::string& dir() const { return dir_; }
  std::string log_path() const;
  // Bytes dropped from a torn tail when the store was opened.
  std::size_t recovered_bytes() const { return recovered_bytes_; }

  // Streams matching observations ordered by (check id, repetition,
  // vantage, persona). Only an index of offsets is held in memory.
  void replay(const ReplayQuery& query, const std::function<void(const PriceObservation&)>& sink) const;
  std::vector<PriceObservation> replay(const ReplayQuery& query) const;

 private:
  void recover();

  std::string dir_;
  StoreOptions options_;
  int fd_ = -1;
  mutable std::mutex mu_;
  std::unordered_set<std::string> keys_;
  AppendHook hook_;
  std::size_t recovered_bytes_ = 0;
};

// Replays a store directory without taking the append lock.
void replay_file(const std::string& log_path, const ReplayQuery& query,
                 const std::function<void(const PriceObservation&)>& sink);

}  // namespace sheriff::net
