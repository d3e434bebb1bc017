#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "electrend/calendar.hpp"
#include "electrend/tweet.hpp"

namespace electrend::testing {

inline Timestamp ts(std::string_view iso) { return *parse_timestamp(iso); }

inline TweetRecord tweet(std::string id, std::string user, std::string_view iso,
                         std::string text) {
  TweetRecord r;
  r.tweet_id = std::move(id);
  r.user_id = std::move(user);
  r.created_at = ts(iso);
  r.hashtags = extract_hashtags(text);
  r.text = std::move(text);
  return r;
}

/// A record already assigned to `day` (origin 2019-03-01) with a stance.
inline TweetRecord labeled(const std::string& user, DayIndex day, StanceLabel label,
                           int serial = 0) {
  const Date origin{std::chrono::year{2019} / std::chrono::March / 1};
  TweetRecord r;
  r.tweet_id = user + "-" + std::to_string(day) + "-" + std::to_string(serial);
  r.user_id = user;
  r.created_at = std::chrono::sys_seconds(date_of_day(origin, day)) + std::chrono::hours(12);
  r.text = "x";
  r.day = DayStamp{day, date_of_day(origin, day)};
  r.stance = label;
  return r;
}

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "electrend-XXXXXX").string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace electrend::testing
