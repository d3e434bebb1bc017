#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "electrend/tweet.hpp"

namespace electrend {

struct UserActivity {
  std::string user_id;
  std::uint64_t total_tweets = 0;
  std::uint64_t active_days = 0;
  std::uint64_t max_tweets_per_day = 0;
  /// 1 - distinct normalized texts / total
  double duplicate_text_ratio = 0.0;
  /// (last - first) / (total - 1); +inf for a single tweet.
  double mean_inter_tweet_seconds = 0.0;
};

struct BotRules {
  double rate_cap = 72.0;      // tweets in one day
  double duplicate_cap = 0.8;  // duplicate_text_ratio
  double gap_floor = 30.0;     // seconds
  double rate_weight = 1.0 / 3.0;
  double duplicate_weight = 1.0 / 3.0;
  double burst_weight = 1.0 / 3.0;
  double threshold = 0.5;

  /// Throws UsageError on negative caps/weights or a threshold outside (0, 1].
  void validate() const;
};

struct BotVerdict {
  std::string user_id;
  double score = 0.0;
  bool is_bot = false;
  std::vector<std::string> triggered_rules;
};

/// Streaming per-user reduction. Days come from the record's assigned day when
/// present, otherwise from its UTC date.
class ActivityProfiler {
 public:
  void add(const TweetRecord& record);
  void merge(const ActivityProfiler& other);
  /// One entry per user, sorted by user_id.
  std::vector<UserActivity> finish() const;

 private:
  struct Accumulator {
    std::uint64_t total = 0;
    std::unordered_map<std::int64_t, std::uint64_t> per_day;
    std::unordered_set<std::uint64_t> text_hashes;
    std::int64_t first = 0;
    std::int64_t last = 0;
  };
  static UserActivity summarize(const std::string& user, const Accumulator& acc);

  std::unordered_map<std::string, Accumulator> users_;
};

/// Throws DataError on an empty span or mixed users.
UserActivity profile_user(std::span<const TweetRecord> records);

/// Weighted sum of the rate, duplication and burst rules, clamped to [0, 1].
BotVerdict score_user(const UserActivity& activity, const BotRules& rules);

struct BotFilterResult {
  std::vector<TweetRecord> clean;
  /// Verdict for every observed user, sorted by user_id.
  std::vector<BotVerdict> report;
  std::size_t removed_users() const;
  std::size_t removed_records = 0;
};

/// Removes every record of each flagged user; relative order of kept records is preserved.
BotFilterResult filter_corpus(std::vector<TweetRecord> corpus, const BotRules& rules);

/// CSV: user_id,score,is_bot,triggered_rules (rules joined by ';').
void write_bot_report(std::ostream& out, const std::vector<BotVerdict>& report);

}  // namespace electrend
