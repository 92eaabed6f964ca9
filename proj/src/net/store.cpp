#include "sheriff/net/store.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <tuple>

namespace sheriff::net {

namespace fs = std::filesystem;

namespace {

constexpr const char* kLogName = "observations.jsonl";

void write_all(int fd, std::string_view data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) throw StoreError(std::string("write failed: ") + std::strerror(errno));
    off += static_cast<std::size_t>(n);
  }
}

struct IndexEntry {
  std::string check_id;
  int repetition;
  std::string vantage;
  std::string persona;
  std::uint64_t offset;
  std::uint32_t length;
};

// Calls fn(offset, line) for every complete line.
template <typename Fn>
void scan_lines(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    if (in.eof()) break;  // no trailing newline: torn or still being written
    fn(offset, line);
    offset += line.size() + 1;
  }
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw StoreError("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

SnapshotStore::SnapshotStore(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::string SnapshotStore::path_for(const std::string& ref) const {
  if (ref.size() != 64 || ref.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw StoreError("not a snapshot reference: '" + ref + "'");
  }
  return (fs::path(dir_) / (ref + ".html")).string();
}

std::string SnapshotStore::put(std::string_view body) {
  std::string ref = sha256_hex(body);
  std::string path = path_for(ref);
  if (fs::exists(path)) return ref;
  thread_local std::mt19937_64 rng(std::random_device{}());
  std::string tmp = path + ".tmp" + std::to_string(rng());
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw StoreError("cannot create " + tmp + ": " + std::strerror(errno));
  try {
    write_all(fd, body);
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::fsync(fd);
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    ::unlink(tmp.c_str());
    throw StoreError("cannot publish snapshot " + ref + ": " + std::strerror(errno));
  }
  return ref;
}

std::optional<std::string> SnapshotStore::get(const std::string& ref) const {
  std::ifstream in(path_for(ref), std::ios::binary);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool SnapshotStore::contains(const std::string& ref) const { return fs::exists(path_for(ref)); }

bool ReplayQuery::matches(const PriceObservation& obs) const {
  if (domain && obs.domain != *domain) return false;
  if (product_uri && obs.product_uri != *product_uri) return false;
  if (vantage && obs.vantage != *vantage) return false;
  if (from && obs.fetched_at < *from) return false;
  if (to && !(obs.fetched_at < *to)) return false;
  return true;
}

ObservationStore::ObservationStore(std::string dir, StoreOptions options)
    : dir_(std::move(dir)), options_(options) {
  fs::create_directories(dir_);
  recover();
  fd_ = ::open(log_path().c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw StoreError("cannot open " + log_path() + ": " + std::strerror(errno));
}

ObservationStore::~ObservationStore() {
  if (fd_ >= 0) ::close(fd_);
}

std::string ObservationStore::log_path() const { return (fs::path(dir_) / kLogName).string(); }

void ObservationStore::recover() {
  std::string path = log_path();
  if (!fs::exists(path)) return;
  std::uint64_t good_end = 0;
  std::uint64_t size = fs::file_size(path);
  std::ifstream in(path, std::ios::binary);
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    bool complete = !in.eof();
    std::uint64_t next = offset + line.size() + (complete ? 1 : 0);
    if (!complete) break;
    try {
      auto obs = observation_from_json(nlohmann::json::parse(line));
      keys_.insert(obs.key());
    } catch (const std::exception& e) {
      if (next < size) throw StoreError("corrupt record at byte " + std::to_string(offset) + ": " + e.what());
      break;
    }
    good_end = next;
    offset = next;
  }
  in.close();
  if (good_end < size) {
    recovered_bytes_ = static_cast<std::size_t>(size - good_end);
    fs::resize_file(path, good_end);
  }
}

bool ObservationStore::append(const PriceObservation& obs) {
  std::string line = to_json(obs).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  line.push_back('\n');
  std::lock_guard lock(mu_);
  std::string key = obs.key();
  if (keys_.count(key)) return false;
  write_all(fd_, line);
  if (options_.sync) ::fdatasync(fd_);
  keys_.insert(std::move(key));
  if (hook_) hook_(obs);
  return true;
}

void ObservationStore::set_append_hook(AppendHook hook) {
  std::lock_guard lock(mu_);
  hook_ = std::move(hook);
}

bool ObservationStore::contains(const std::string& key) const {
  std::lock_guard lock(mu_);
  return keys_.count(key) > 0;
}

std::size_t ObservationStore::size() const {
  std::lock_guard lock(mu_);
  return keys_.size();
}

void ObservationStore::replay(const ReplayQuery& query,
                              const std::function<void(const PriceObservation&)>& sink) const {
  replay_file(log_path(), query, sink);
}

std::vector<PriceObservation> ObservationStore::replay(const ReplayQuery& query) const {
  std::vector<PriceObservation> out;
  replay(query, [&](const PriceObservation& obs) { out.push_back(obs); });
  return out;
}

void replay_file(const std::string& log_path, const ReplayQuery& query,
                 const std::function<void(const PriceObservation&)>& sink) {
  std::vector<IndexEntry> index;
  scan_lines(log_path, [&](std::uint64_t offset, const std::string& line) {
    PriceObservation obs;
    try {
      obs = observation_from_json(nlohmann::json::parse(line));
    } catch (const std::exception&) {
      return;
    }
    if (!query.matches(obs)) return;
    index.push_back({std::move(obs.check_id), obs.repetition, std::move(obs.vantage), std::move(obs.persona), offset,
                     static_cast<std::uint32_t>(line.size())});
  });
  std::sort(index.begin(), index.end(), [](const IndexEntry& a, const IndexEntry& b) {
    return std::tie(a.check_id, a.repetition, a.vantage, a.persona) <
           std::tie(b.check_id, b.repetition, b.vantage, b.persona);
  });
  int fd = ::open(log_path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) {
    if (index.empty()) return;
    throw StoreError("cannot reopen " + log_path);
  }
  std::string line;
  try {
    for (const auto& e : index) {
      line.resize(e.length);
      std::size_t got = 0;
      while (got < e.length) {
        ssize_t n = ::pread(fd, line.data() + got, e.length - got, static_cast<off_t>(e.offset + got));
        if (n <= 0) throw StoreError("short read in " + log_path);
        got += static_cast<std::size_t>(n);
      }
      sink(observation_from_json(nlohmann::json::parse(line)));
    }
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

}  // namespace sheriff::net
