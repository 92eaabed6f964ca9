#include "sheriff/core/time.hpp"

#include "sheriff/core/errors.hpp"

#include <charconv>
#include <cstdio>

namespace sheriff {

namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw InvalidArgument("truncated time value: " + std::string(text));
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc() || ptr != text.data() + pos + len) {
    throw InvalidArgument("malformed time value: " + std::string(text));
  }
  return value;
}

}  // namespace

Timestamp now() {
  return std::chrono::time_point_cast<Millis>(std::chrono::system_clock::now());
}

Timestamp from_epoch_ms(std::int64_t ms) { return Timestamp(Millis(ms)); }

std::int64_t to_epoch_ms(Timestamp t) { return t.time_since_epoch().count(); }

Date utc_day(Timestamp t) { return Date(std::chrono::floor<std::chrono::days>(t)); }

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Date parse_date(std::string_view text) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
    throw InvalidArgument("expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  Date d{std::chrono::year(parse_int(text, 0, 4)),
         std::chrono::month(static_cast<unsigned>(parse_int(text, 5, 2))),
         std::chrono::day(static_cast<unsigned>(parse_int(text, 8, 2)))};
  if (!d.ok()) throw InvalidArgument("invalid calendar date '" + std::string(text) + "'");
  return d;
}

std::string format_timestamp(Timestamp t) {
  auto day = std::chrono::floor<std::chrono::days>(t);
  Date d{day};
  auto ms = (t - day).count();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%sT%02lld:%02lld:%02lld.%03lldZ", format_date(d).c_str(),
                static_cast<long long>(ms / 3600000), static_cast<long long>(ms / 60000 % 60),
                static_cast<long long>(ms / 1000 % 60), static_cast<long long>(ms % 1000));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  Date d = parse_date(text);
  Timestamp t = std::chrono::time_point_cast<Millis>(std::chrono::sys_days(d));
  if (text.size() == 10) return t;
  if (text[10] != 'T' && text[10] != ' ') {
    throw InvalidArgument("malformed timestamp '" + std::string(text) + "'");
  }
  int h = parse_int(text, 11, 2);
  int m = parse_int(text, 14, 2);
  int s = parse_int(text, 17, 2);
  int ms = 0;
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    std::size_t end = pos + 1;
    while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
    std::string frac(text.substr(pos + 1, end - pos - 1));
    frac.resize(3, '0');
    ms = parse_int(frac, 0, 3);
    pos = end;
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) throw InvalidArgument("malformed timestamp '" + std::string(text) + "'");
  return t + std::chrono::hours(h) + std::chrono::minutes(m) + std::chrono::seconds(s) + Millis(ms);
}

Millis parse_duration(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == 0) throw InvalidArgument("malformed duration '" + std::string(text) + "'");
  long long n = 0;
  std::from_chars(text.data(), text.data() + i, n);
  std::string_view unit = text.substr(i);
  if (unit.empty() || unit == "ms") return Millis(n);
  if (unit == "s") return Millis(n * 1000);
  if (unit == "m" || unit == "min") return Millis(n * 60'000);
  if (unit == "h") return Millis(n * 3'600'000);
  if (unit == "d") return Millis(n * 86'400'000);
  throw InvalidArgument("unknown duration unit in '" + std::string(text) + "'");
}

}  // namespace sheriff
