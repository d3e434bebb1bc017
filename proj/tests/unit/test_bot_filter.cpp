#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "electrend/bot_filter.hpp"
#include "electrend/errors.hpp"
#include "fixtures.hpp"

using namespace electrend;
using electrend::testing::ts;
using electrend::testing::tweet;

namespace {

std::vector<TweetRecord> user_tweets(const std::string& user, const std::vector<std::string>& texts,
                                     Timestamp start, std::chrono::seconds step) {
  std::vector<TweetRecord> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    TweetRecord r;
    r.tweet_id = user + "-" + std::to_string(i);
    r.user_id = user;
    r.created_at = start + step * static_cast<long>(i);
    r.text = texts[i];
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(ProfileUser, DistinctSameDay) {
  const auto rs = user_tweets("u", {"a", "b", "c"}, ts("2019-03-01T10:00:00Z"),
                              std::chrono::minutes(10));
  const auto a = profile_user(rs);
  EXPECT_EQ(a.total_tweets, 3u);
  EXPECT_EQ(a.active_days, 1u);
  EXPECT_EQ(a.max_tweets_per_day, 3u);
  EXPECT_DOUBLE_EQ(a.duplicate_text_ratio, 0.0);
  EXPECT_DOUBLE_EQ(a.mean_inter_tweet_seconds, 600.0);
}

TEST(ProfileUser, DuplicateRatio) {
  const auto rs = user_tweets("u", {"a", "a", "a", "b"}, ts("2019-03-01T10:00:00Z"),
                              std::chrono::hours(30));
  const auto a = profile_user(rs);
  EXPECT_DOUBLE_EQ(a.duplicate_text_ratio, 0.5);
  EXPECT_EQ(a.active_days, 4u);
}

TEST(ProfileUser, NormalizedTextCountsAsDuplicate) {
  const auto rs = user_tweets("u", {"Vamos  Macri", "vamos macri", " VAMOS\tMACRI "},
                              ts("2019-03-01T10:00:00Z"), std::chrono::minutes(1));
  EXPECT_NEAR(profile_user(rs).duplicate_text_ratio, 2.0 / 3.0, 1e-12);
}

TEST(ProfileUser, BurstOfIdenticalTweets) {
  // 200 identical tweets spread evenly over one hour
  std::vector<TweetRecord> rs;
  for (int i = 0; i < 200; ++i) {
    TweetRecord r;
    r.tweet_id = std::to_string(i);
    r.user_id = "bot";
    r.created_at = ts("2019-03-01T10:00:00Z") + std::chrono::seconds(i * 3600 / 199);
    r.text = "compra ya";
    rs.push_back(r);
  }
  const auto a = profile_user(rs);
  EXPECT_NEAR(a.mean_inter_tweet_seconds, 3600.0 / 199.0, 0.01);
  EXPECT_NEAR(a.mean_inter_tweet_seconds, 18.0, 0.1);
  EXPECT_DOUBLE_EQ(a.duplicate_text_ratio, 0.995);
}

TEST(ProfileUser, Errors) {
  EXPECT_THROW(profile_user({}), DataError);
  auto rs = user_tweets("u", {"a"}, ts("2019-03-01T10:00:00Z"), std::chrono::seconds(1));
  rs.push_back(tweet("x", "v", "2019-03-01T10:00:00Z", "b"));
  EXPECT_THROW(profile_user(rs), DataError);
  const auto single = profile_user(std::span(rs).first(1));
  EXPECT_TRUE(std::isinf(single.mean_inter_tweet_seconds));
}

TEST(ScoreUser, RuleTable) {
  BotRules rules;
  UserActivity human{"h", 40, 10, 20, 0.05, 3600.0};
  const auto v = score_user(human, rules);
  EXPECT_EQ(v.score, 0.0);
  EXPECT_FALSE(v.is_bot);
  EXPECT_TRUE(v.triggered_rules.empty());

  UserActivity bot{"b", 500, 1, 500, 0.99, 5.0};
  const auto b = score_user(bot, rules);
  EXPECT_DOUBLE_EQ(b.score, 1.0);
  EXPECT_TRUE(b.is_bot);
  EXPECT_EQ(b.triggered_rules, (std::vector<std::string>{"rate", "duplication", "burst"}));

  BotRules weighted;
  weighted.rate_weight = 0.4;
  weighted.duplicate_weight = 0.3;
  weighted.burst_weight = 0.3;
  UserActivity dup_only{"d", 10, 10, 1, 0.9, 86400.0};
  const auto d = score_user(dup_only, weighted);
  EXPECT_DOUBLE_EQ(d.score, 0.3);
  EXPECT_FALSE(d.is_bot);
  EXPECT_EQ(d.triggered_rules, std::vector<std::string>{"duplication"});
}

TEST(ScoreUser, StrictCapsAndClamp) {
  BotRules rules;
  UserActivity at_caps{"c", 72, 1, 72, 0.8, 30.0};
  EXPECT_EQ(score_user(at_caps, rules).score, 0.0);
  BotRules heavy;
  heavy.rate_weight = heavy.duplicate_weight = heavy.burst_weight = 0.9;
  UserActivity bot{"b", 500, 1, 500, 0.99, 5.0};
  EXPECT_EQ(score_user(bot, heavy).score, 1.0);
}

TEST(ScoreUser, VerdictInvariant) {
  BotRules rules;
  for (double th : {0.1, 0.34, 0.5, 0.67, 1.0}) {
    rules.threshold = th;
    for (int mask = 0; mask < 8; ++mask) {
      UserActivity a{"u", 100, 1, (mask & 1) ? 100u : 5u, (mask & 2) ? 0.9 : 0.0,
                     (mask & 4) ? 1.0 : 1000.0};
      const auto v = score_user(a, rules);
      EXPECT_EQ(v.is_bot, v.score >= th);
      if (v.is_bot) EXPECT_FALSE(v.triggered_rules.empty());
    }
  }
}

TEST(BotRules, Validation) {
  BotRules r;
  r.threshold = 0.0;
  EXPECT_THROW(r.validate(), UsageError);
  r.threshold = 1.5;
  EXPECT_THROW(r.validate(), UsageError);
  r = BotRules{};
  r.rate_cap = -1;
  EXPECT_THROW(r.validate(), UsageError);
}

namespace {

// 8 humans tweeting a few distinct texts a day, 2 bots repeating one slogan in bursts.
std::vector<TweetRecord> planted_fixture() {
  std::vector<TweetRecord> corpus;
  int id = 0;
  for (int u = 0; u < 8; ++u) {
    for (int d = 0; d < 10; ++d) {
      for (int k = 0; k < 3; ++k) {
        corpus.push_back(tweet(std::to_string(id++), fmt::format("human{}", u),
                               fmt::format("2019-03-{:02d}T{:02d}:{:02d}:00Z", d + 1, 8 + k * 4, u),
                               fmt::format("opinion {} of human {} on day {}", k, u, d)));
      }
    }
  }
  for (int b = 0; b < 2; ++b) {
    for (int d = 0; d < 3; ++d) {
      for (int k = 0; k < 90; ++k) {
        corpus.push_back(tweet(std::to_string(id++), fmt::format("bot{}", b),
                               fmt::format("2019-03-{:02d}T12:{:02d}:{:02d}Z", d + 1, k / 6,
                                           (k % 6) * 10),
                               "VOTEN A MACRI #cambiemos"));
      }
    }
  }
  return corpus;
}

}  // namespace

TEST(FilterCorpus, RemovesExactlyPlantedBots) {
  const auto corpus = planted_fixture();
  const auto result = filter_corpus(corpus, BotRules{});
  EXPECT_EQ(result.report.size(), 10u);
  EXPECT_EQ(result.removed_users(), 2u);
  for (const auto& v : result.report) {
    EXPECT_EQ(v.is_bot, v.user_id.starts_with("bot")) << v.user_id;
  }
  EXPECT_EQ(result.removed_records, 540u);
  EXPECT_EQ(result.clean.size(), corpus.size() - 540);
  for (const auto& r : result.clean) EXPECT_TRUE(r.user_id.starts_with("human"));
}

TEST(FilterCorpus, Idempotent) {
  const auto once = filter_corpus(planted_fixture(), BotRules{});
  const auto twice = filter_corpus(once.clean, BotRules{});
  EXPECT_EQ(twice.clean, once.clean);
  EXPECT_EQ(twice.removed_users(), 0u);
}

TEST(FilterCorpus, IdentityAndAnnihilation) {
  std::vector<TweetRecord> humans;
  for (const auto& r : planted_fixture()) {
    if (r.user_id.starts_with("human")) humans.push_back(r);
  }
  EXPECT_EQ(filter_corpus(humans, BotRules{}).clean, humans);

  std::vector<TweetRecord> bots;
  for (const auto& r : planted_fixture()) {
    if (r.user_id.starts_with("bot")) bots.push_back(r);
  }
  const auto gone = filter_corpus(bots, BotRules{});
  EXPECT_TRUE(gone.clean.empty());
  EXPECT_EQ(gone.report.size(), 2u);
}

TEST(FilterCorpus, ThresholdMonotone) {
  const auto corpus = planted_fixture();
  std::size_t previous = corpus.size();
  for (double th : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    BotRules r;
    r.threshold = th;
    const auto removed = filter_corpus(corpus, r).removed_users();
    EXPECT_LE(removed, previous);
    previous = removed;
  }
}

TEST(FilterCorpus, UserComplete) {
  const auto corpus = planted_fixture();
  const auto result = filter_corpus(corpus, BotRules{});
  std::map<std::string, std::size_t> before, after;
  for (const auto& r : corpus) ++before[r.user_id];
  for (const auto& r : result.clean) ++after[r.user_id];
  for (const auto& [u, n] : after) EXPECT_EQ(n, before[u]);
}
