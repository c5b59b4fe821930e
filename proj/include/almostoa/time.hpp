#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace almostoa {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;
using Duration = std::chrono::seconds;

constexpr Duration days(long n) { return std::chrono::duration_cast<Duration>(std::chrono::days{n}); }

/// "2009-01-28"
std::string format_date(Date d);
/// "2009-01-28T16:18:00Z"
std::string format_timestamp(Timestamp t);

/// Strict ISO-8601 calendar date (YYYY-MM-DD). Returns nullopt on any deviation.
std::optional<Date> parse_date(std::string_view text);

/// ISO-8601 UTC timestamp: YYYY-MM-DDTHH:MM:SS followed by Z or a +HH:MM / -HH:MM
/// offset. A bare date is accepted and means midnight UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Durations written as "<n>d", "<n>h", "<n>m", "<n>s" or a plain number of seconds.
std::optional<Duration> parse_duration(std::string_view text);
std::string format_duration(Duration d);

/// Calendar date of `t` in a zone that sits `utc_offset` away from UTC.
Date local_date(Timestamp t, std::chrono::minutes utc_offset = std::chrono::minutes{0});

Timestamp system_now();

}  // namespace almostoa
