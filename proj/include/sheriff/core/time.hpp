#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace sheriff {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Millis = std::chrono::milliseconds;
using Date = std::chrono::year_month_day;

Timestamp now();
Timestamp from_epoch_ms(std::int64_t ms);
std::int64_t to_epoch_ms(Timestamp t);

Date utc_day(Timestamp t);

// "2013-02-01"
std::string format_date(Date d);
Date parse_date(std::string_view text);

// "2013-02-01T10:15:30.250Z"
std::string format_timestamp(Timestamp t);
// Accepts the format above, with or without milliseconds, or a bare date
// (midnight UTC).
Timestamp parse_timestamp(std::string_view text);

// "24h", "2s", "500ms", "10m", or a bare number of milliseconds.
Millis parse_duration(std::string_view text);

}  // namespace sheriff
