#include "electrend/calendar.hpp"

#include <array>
#include <charconv>

#include <fmt/format.h>

namespace electrend {
namespace {

using namespace std::chrono;

bool read_fixed(std::string_view s, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > s.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + width; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

std::optional<Date> make_date(int y, int m, int d) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::optional<Timestamp> make_instant(Date date, int hh, int mm, int ss) {
  // ss == 60 tolerated as a leap-second spelling
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  return Timestamp{date} + hours{hh} + minutes{mm} + seconds{ss};
}

// "+HH:MM", "+HHMM", "+HH", "Z"; returns offset in seconds east of UTC.
std::optional<long> parse_zone(std::string_view z) {
  if (z.empty() || z == "Z" || z == "z") return 0L;
  if (z[0] != '+' && z[0] != '-') return std::nullopt;
  const long sign = z[0] == '-' ? -1 : 1;
  int hh = 0;
  int mm = 0;
  if (!read_fixed(z, 1, 2, hh)) return std::nullopt;
  if (z.size() == 3) {
  } else if (z.size() == 6 && z[3] == ':') {
    if (!read_fixed(z, 4, 2, mm)) return std::nullopt;
  } else if (z.size() == 5) {
    if (!read_fixed(z, 3, 2, mm)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59) return std::nullopt;
  return sign * (hh * 3600L + mm * 60L);
}

std::optional<Timestamp> parse_iso(std::string_view s) {
  int y = 0, mo = 0, d = 0, hh = 0, mi = 0, ss = 0;
  if (s.size() < 19) return std::nullopt;
  if (!read_fixed(s, 0, 4, y) || s[4] != '-' || !read_fixed(s, 5, 2, mo) || s[7] != '-' ||
      !read_fixed(s, 8, 2, d) || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
      !read_fixed(s, 11, 2, hh) || s[13] != ':' || !read_fixed(s, 14, 2, mi) || s[16] != ':' ||
      !read_fixed(s, 17, 2, ss)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
    ++pos;
    const std::size_t digits_start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == digits_start) return std::nullopt;
  }
  const auto zone = parse_zone(s.substr(pos));
  if (!zone) return std::nullopt;
  const auto date = make_date(y, mo, d);
  if (!date) return std::nullopt;
  const auto local = make_instant(*date, hh, mi, ss);
  if (!local) return std::nullopt;
  return *local - seconds{*zone};
}

// "Fri Mar 01 12:00:00 +0000 2019"
std::optional<Timestamp> parse_twitter_classic(std::string_view s) {
  static constexpr std::array<std::string_view, 12> kMonths = {
      "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  if (s.size() != 30 || s[3] != ' ' || s[7] != ' ' || s[10] != ' ' || s[19] != ' ' ||
      s[25] != ' ') {
    return std::nullopt;
  }
  int mo = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (s.substr(4, 3) == kMonths[i]) mo = static_cast<int>(i) + 1;
  }
  int d = 0, hh = 0, mi = 0, ss = 0, y = 0;
  if (mo == 0 || !read_fixed(s, 8, 2, d) || !read_fixed(s, 11, 2, hh) || s[13] != ':' ||
      !read_fixed(s, 14, 2, mi) || s[16] != ':' || !read_fixed(s, 17, 2, ss) ||
      !read_fixed(s, 26, 4, y)) {
    return std::nullopt;
  }
  const auto zone = parse_zone(s.substr(20, 5));
  const auto date = make_date(y, mo, d);
  if (!zone || !date) return std::nullopt;
  const auto local = make_instant(*date, hh, mi, ss);
  if (!local) return std::nullopt;
  return *local - seconds{*zone};
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  if (!text.empty() && text[0] >= '0' && text[0] <= '9') return parse_iso(text);
  return parse_twitter_classic(text);
}

std::string format_timestamp(Timestamp ts) {
  const auto day_start = floor<days>(ts);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{ts - day_start};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

std::optional<Date> parse_date(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || !read_fixed(text, 0, 4, y) || text[4] != '-' ||
      !read_fixed(text, 5, 2, m) || text[7] != '-' || !read_fixed(text, 8, 2, d)) {
    return std::nullopt;
  }
  return make_date(y, m, d);
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

Date local_date(Timestamp ts, int offset_hours) {
  return floor<days>(ts + hours{offset_hours});
}

}  // namespace electrend
