#include "electrend/bot_filter.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "electrend/errors.hpp"
#include "electrend/io.hpp"
#include "electrend/text.hpp"

namespace electrend {
namespace {

std::int64_t activity_day(const TweetRecord& r) {
  if (r.day) return r.day->t;
  return local_date(r.created_at).time_since_epoch().count();
}

}  // namespace

void BotRules::validate() const {
  if (rate_cap < 0 || duplicate_cap < 0 || gap_floor < 0) {
    throw UsageError("bot rule caps must be non-negative");
  }
  if (rate_weight < 0 || duplicate_weight < 0 || burst_weight < 0) {
    throw UsageError("bot rule weights must be non-negative");
  }
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw UsageError("bot threshold must lie in (0, 1]");
  }
}

void ActivityProfiler::add(const TweetRecord& record) {
  auto& acc = users_[record.user_id];
  const std::int64_t ts = record.created_at.time_since_epoch().count();
  if (acc.total == 0) {
    acc.first = acc.last = ts;
  } else {
    acc.first = std::min(acc.first, ts);
    acc.last = std::max(acc.last, ts);
  }
  ++acc.total;
  ++acc.per_day[activity_day(record)];
  acc.text_hashes.insert(std::hash<std::string>{}(text::normalize_whitespace_lower(record.text)));
}

void ActivityProfiler::merge(const ActivityProfiler& other) {
  for (const auto& [user, theirs] : other.users_) {
    auto& acc = users_[user];
    if (acc.total == 0) {
      acc = theirs;
      continue;
    }
    acc.total += theirs.total;
    acc.first = std::min(acc.first, theirs.first);
    acc.last = std::max(acc.last, theirs.last);
    for (const auto& [d, n] : theirs.per_day) acc.per_day[d] += n;
    acc.text_hashes.insert(theirs.text_hashes.begin(), theirs.text_hashes.end());
  }
}

UserActivity ActivityProfiler::summarize(const std::string& user, const Accumulator& acc) {
  UserActivity a;
  a.user_id = user;
  a.total_tweets = acc.total;
  a.active_days = acc.per_day.size();
  for (const auto& [d, n] : acc.per_day) a.max_tweets_per_day = std::max(a.max_tweets_per_day, n);
  a.duplicate_text_ratio =
      1.0 - static_cast<double>(acc.text_hashes.size()) / static_cast<double>(acc.total);
  a.mean_inter_tweet_seconds =
      acc.total < 2 ? std::numeric_limits<double>::infinity()
                    : static_cast<double>(acc.last - acc.first) / static_cast<double>(acc.total - 1);
  return a;
}

std::vector<UserActivity> ActivityProfiler::finish() const {
  std::vector<UserActivity> out;
  out.reserve(users_.size());
  for (const auto& [user, acc] : users_) out.push_back(summarize(user, acc));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.user_id < b.user_id; });
  return out;
}

UserActivity profile_user(std::span<const TweetRecord> records) {
  if (records.empty()) throw DataError("cannot profile a user without records");
  ActivityProfiler profiler;
  for (const auto& r : records) {
    if (r.user_id != records.front().user_id) {
      throw DataError("profile_user: records belong to more than one user");
    }
    profiler.add(r);
  }
  return profiler.finish().front();
}

BotVerdict score_user(const UserActivity& activity, const BotRules& rules) {
  BotVerdict v;
  v.user_id = activity.user_id;
  double score = 0.0;
  if (static_cast<double>(activity.max_tweets_per_day) > rules.rate_cap) {
    score += rules.rate_weight;
    v.triggered_rules.emplace_back("rate");
  }
  if (activity.duplicate_text_ratio > rules.duplicate_cap) {
    score += rules.duplicate_weight;
    v.triggered_rules.emplace_back("duplication");
  }
  if (activity.mean_inter_tweet_seconds < rules.gap_floor) {
    score += rules.burst_weight;
    v.triggered_rules.emplace_back("burst");
  }
  v.score = std::clamp(score, 0.0, 1.0);
  // threshold > 0 guarantees a bot verdict has at least one triggered rule
  v.is_bot = v.score >= rules.threshold;
  return v;
}

std::size_t BotFilterResult::removed_users() const {
  return static_cast<std::size_t>(
      std::count_if(report.begin(), report.end(), [](const auto& v) { return v.is_bot; }));
}

BotFilterResult filter_corpus(std::vector<TweetRecord> corpus, const BotRules& rules) {
  rules.validate();
  ActivityProfiler profiler;
  for (const auto& r : corpus) profiler.add(r);

  BotFilterResult result;
  std::unordered_set<std::string> bots;
  for (const auto& activity : profiler.finish()) {
    auto verdict = score_user(activity, rules);
    if (verdict.is_bot) bots.insert(verdict.user_id);
    result.report.push_back(std::move(verdict));
  }
  if (bots.empty()) {
    result.clean = std::move(corpus);
    return result;
  }
  result.clean.reserve(corpus.size());
  for (auto& r : corpus) {
    if (bots.count(r.user_id) != 0) {
      ++result.removed_records;
    } else {
      result.clean.push_back(std::move(r));
    }
  }
  return result;
}

void write_bot_report(std::ostream& out, const std::vector<BotVerdict>& report) {
  out << "user_id,score,is_bot,triggered_rules\n";
  for (const auto& v : report) {
    std::string rules;
    for (const auto& r : v.triggered_rules) {
      if (!rules.empty()) rules.push_back(';');
      rules += r;
    }
    out << io::csv_field(v.user_id) << ',' << fmt::format("{:.6f}", v.score) << ','
        << (v.is_bot ? "true" : "false") << ',' << rules << '\n';
  }
}

}  // namespace electrend
