#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace electrend {

/// UTC instant with second precision.
using Timestamp = std::chrono::sys_seconds;
/// Calendar date (days since the Unix epoch).
using Date = std::chrono::sys_days;
/// 1-based day of observation; day 1 is the corpus origin date.
using DayIndex = std::int32_t;

/// Parses an ISO-8601 instant. Accepted forms:
///   2019-03-01T12:00:00Z, 2019-03-01T12:00:00.250-03:00, 2019-03-01 12:00:00+0300,
///   2019-03-01T12:00:00 (no zone: UTC).
/// The classic Twitter `created_at` form "Fri Mar 01 12:00:00 +0000 2019" is accepted too.
/// Fractional seconds are truncated. Returns nullopt on any malformed or out-of-range field.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp ts);

/// Strict "YYYY-MM-DD".
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

/// Calendar date of `ts` after shifting it by `offset_hours`.
Date local_date(Timestamp ts, int offset_hours = 0);

/// t = 1 + whole days between `origin` and `date`.
inline DayIndex day_index(Date origin, Date date) {
  return static_cast<DayIndex>((date - origin).count()) + 1;
}

inline Date date_of_day(Date origin, DayIndex t) {
  return origin + std::chrono::days(t - 1);
}

}  // namespace electrend
