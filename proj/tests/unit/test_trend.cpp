#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "electrend/counters.hpp"
#include "electrend/errors.hpp"
#include "electrend/trend.hpp"
#include "fixtures.hpp"

using namespace electrend;
using electrend::testing::labeled;

namespace {

constexpr auto M = StanceLabel::ProMP;
constexpr auto F = StanceLabel::ProFF;
constexpr auto T3 = StanceLabel::ProThird;
constexpr auto N = StanceLabel::Neutral;

// n[t-1] tweets of `label` on day t
void add_series(std::vector<TweetRecord>& out, const std::string& user, StanceLabel label,
                const std::vector<int>& n) {
  for (std::size_t t = 0; t < n.size(); ++t) {
    for (int k = 0; k < n[t]; ++k) {
      out.push_back(labeled(user, static_cast<DayIndex>(t + 1), label,
                            static_cast<int>(out.size())));
    }
  }
}

std::vector<TweetRecord> random_corpus(std::uint64_t seed, int users, int days, double density) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<TweetRecord> out;
  int serial = 0;
  for (int u = 0; u < users; ++u) {
    const double lean = unit(rng);
    for (DayIndex d = 1; d <= days; ++d) {
      if (unit(rng) > density) continue;
      const int n = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < n; ++k) {
        const double x = unit(rng);
        const StanceLabel l = x < lean * 0.8 ? M : x < 0.8 ? F : x < 0.9 ? T3 : N;
        out.push_back(labeled("u" + std::to_string(u), d, l, serial++));
      }
    }
  }
  return out;
}

const TrendOptions kOptions{*parse_date("2019-03-01")};

}  // namespace

TEST(WindowSums, ClampAtDayOne) {
  std::vector<TweetRecord> c;
  add_series(c, "u", M, {1, 0, 2, 0, 1});
  const auto t = build_counters(c);
  EXPECT_EQ(window_sums(t, 0, {14, 5}).mp, 4u);
  EXPECT_EQ((WindowConfig{14, 5}.start()), 1);
  EXPECT_EQ((WindowConfig{14, 20}.start()), 7);
}

TEST(WindowSums, DayBeforeStartExcluded) {
  std::vector<TweetRecord> c;
  add_series(c, "u", M, {0, 0, 0, 0, 0, 1});
  const auto t = build_counters(c);
  EXPECT_EQ(window_sums(t, 0, {14, 20}).mp, 0u);
  EXPECT_EQ(window_sums(t, 0, {14, 19}).mp, 1u);
}

TEST(WindowSums, RandomMatchesLoop) {
  const auto corpus = random_corpus(1, 30, 60, 0.3);
  const auto t = build_counters(corpus);
  for (int w : {1, 3, 14, 30, 70}) {
    for (DayIndex T = 1; T <= 60; ++T) {
      for (std::size_t u = 0; u < t.user_count(); ++u) {
        std::uint64_t mp = 0, ff = 0;
        for (const auto& r : corpus) {
          if (r.user_id != t.user_id(u)) continue;
          if (r.day->t < std::max(1, T - w + 1) || r.day->t > T) continue;
          mp += *r.stance == M;
          ff += *r.stance == F;
        }
        const auto s = window_sums(t, u, {w, T});
        ASSERT_EQ(s.mp, mp);
        ASSERT_EQ(s.ff, ff);
      }
    }
  }
}

TEST(Categorize, InstantRules) {
  std::vector<TweetRecord> c;
  add_series(c, "mp", M, {3});
  add_series(c, "mp", F, {1});
  add_series(c, "und", M, {2});
  add_series(c, "und", F, {2});
  add_series(c, "none", T3, {4});
  const auto t = build_counters(c);
  const WindowConfig cfg{14, 1};
  EXPECT_EQ(categorize_instant(t, *t.find_user("mp"), cfg), UserCategory::MP);
  EXPECT_EQ(categorize_instant(t, *t.find_user("und"), cfg), UserCategory::Undecided);
  EXPECT_EQ(categorize_instant(t, *t.find_user("none"), cfg), std::nullopt);
}

TEST(Categorize, CumulativeRules) {
  std::vector<TweetRecord> c;
  add_series(c, "a", M, {2, 0, 1});
  add_series(c, "a", F, {0, 1, 0});
  add_series(c, "third", T3, {1, 1});
  add_series(c, "tie", M, {5});
  add_series(c, "tie", F, {0, 5});
  add_series(c, "early", F, {1});
  const auto t = build_counters(c);
  EXPECT_EQ(categorize_cumulative(t, *t.find_user("a"), {1, 3}), UserCategory::MP);
  EXPECT_EQ(categorize_cumulative(t, *t.find_user("third"), {1, 3}), UserCategory::Unclassified);
  EXPECT_EQ(categorize_cumulative(t, *t.find_user("tie"), {1, 3}), UserCategory::Undecided);
  EXPECT_EQ(categorize_cumulative(t, *t.find_user("early"), {2, 3}), std::nullopt);
  EXPECT_EQ(categorize_cumulative(t, *t.find_user("tie"), {2, 3}), UserCategory::FF);
}

TEST(Configs, Validate) {
  EXPECT_THROW((WindowConfig{0, 5}.validate()), UsageError);
  EXPECT_THROW((WindowConfig{14, 0}.validate()), UsageError);
  EXPECT_THROW((CumulativeConfig{5, 4}.validate()), UsageError);
  EXPECT_THROW((CumulativeConfig{0, 4}.validate()), UsageError);
  EXPECT_NO_THROW((CumulativeConfig{4, 4}.validate()));
}

TEST(TrendInstant, ThreeUsers) {
  std::vector<TweetRecord> c;
  add_series(c, "A", M, {1});
  add_series(c, "B", F, {1});
  add_series(c, "C", F, {2});
  const auto s = trend_instant(build_counters(c), 14, {1, 1}, kOptions);
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_NEAR(*s.points[0].pct_ff, 66.67, 0.005);
  EXPECT_NEAR(*s.points[0].pct_mp, 33.33, 0.005);
  EXPECT_EQ(s.points[0].denominator, 3.0);
}

TEST(TrendInstant, EmptyWindowIsNullNotZero) {
  std::vector<TweetRecord> c;
  add_series(c, "A", M, {1});
  add_series(c, "B", T3, {0, 0, 0, 0, 0, 1});
  const auto t = build_counters(c);
  const auto s = trend_instant(t, 2, {1, 6}, kOptions);
  ASSERT_EQ(s.points.size(), 6u);
  EXPECT_FALSE(s.points[0].is_null());
  for (std::size_t i = 2; i < 6; ++i) {
    EXPECT_TRUE(s.points[i].is_null()) << i;
    EXPECT_EQ(s.points[i].denominator, 0.0);
  }
  std::ostringstream csv;
  write_trend_csv(csv, s);
  EXPECT_NE(csv.str().find("2019-03-04,4,0,0,0,0,,,,0\n"), std::string::npos) << csv.str();
}

TEST(TrendInstant, DecidedOnlyDenominator) {
  std::vector<TweetRecord> c;
  add_series(c, "A", M, {1});
  add_series(c, "B", F, {1});
  add_series(c, "C", F, {1});
  add_series(c, "C", M, {1});
  auto opt = kOptions;
  opt.denominator = InstantDenominator::DecidedOnly;
  const auto p = trend_instant(build_counters(c), 14, {1, 1}, opt).points[0];
  EXPECT_EQ(p.denominator, 2.0);
  EXPECT_DOUBLE_EQ(*p.pct_ff, 50.0);
  EXPECT_DOUBLE_EQ(*p.pct_others, 0.0);
  EXPECT_EQ(p.counts.undecided, 1.0);
}

TEST(TrendCumulative, Singleton) {
  std::vector<TweetRecord> c;
  add_series(c, "A", F, {0, 0, 1});
  const auto s = trend_cumulative(build_counters(c), 3, {3, 3}, kOptions);
  EXPECT_DOUBLE_EQ(*s.points[0].pct_ff, 100.0);
  EXPECT_THROW(trend_cumulative(build_counters(c), 3, {2, 3}, kOptions), UsageError);
}

TEST(TrendSeries, SweepMatchesPointEvaluation) {
  const auto corpus = random_corpus(2, 80, 50, 0.2);
  const auto t = build_counters(corpus, 2);
  for (int w : {1, 7, 14}) {
    const auto s = trend_instant(t, w, {1, 50}, kOptions);
    for (const auto& p : s.points) {
      const auto q = evaluate_instant(t, {w, p.day}, kOptions);
      ASSERT_EQ(p.counts, q.counts) << "w=" << w << " T=" << p.day;
      ASSERT_EQ(p.date, q.date);
    }
  }
  for (DayIndex t0 : {1, 10, 33}) {
    const auto s = trend_cumulative(t, t0, {t0, 50}, kOptions);
    for (const auto& p : s.points) {
      ASSERT_EQ(p.counts, evaluate_cumulative(t, {t0, p.day}, kOptions).counts);
    }
  }
}

TEST(TrendSeries, ClosureAndPartition) {
  const auto corpus = random_corpus(3, 200, 40, 0.15);
  const auto t = build_counters(corpus);
  for (const auto& s : {trend_instant(t, 14, {1, 40}, kOptions),
                        trend_cumulative(t, 1, {1, 40}, kOptions),
                        trend_cumulative(t, 20, {20, 40}, kOptions)}) {
    for (const auto& p : s.points) {
      if (p.is_null()) continue;
      EXPECT_NEAR(*p.pct_ff + *p.pct_mp + *p.pct_others, 100.0, 0.01);
      EXPECT_DOUBLE_EQ(p.counts.mp + p.counts.ff + p.counts.undecided + p.counts.unclassified,
                       p.denominator);
    }
  }
  // every user active in [t0, T] is in exactly one cumulative category
  for (DayIndex T : {10, 25, 40}) {
    std::set<std::string> active;
    for (const auto& r : corpus) {
      if (r.day->t >= 10 && r.day->t <= T) active.insert(r.user_id);
    }
    const auto p = evaluate_cumulative(t, {10, T}, kOptions);
    EXPECT_EQ(p.denominator, static_cast<double>(active.size()));
  }
}

TEST(TrendSeries, WindowCumulativeCoincidence) {
  const auto t = build_counters(random_corpus(4, 150, 14, 0.3));
  for (int w : {14, 20}) {
    for (DayIndex T = 1; T <= 14; ++T) {
      const auto a = evaluate_instant(t, {w, T}, kOptions);
      const auto b = evaluate_cumulative(t, {1, T}, kOptions);
      EXPECT_EQ(a.counts.mp, b.counts.mp);
      EXPECT_EQ(a.counts.ff, b.counts.ff);
      EXPECT_EQ(a.counts.undecided, b.counts.undecided);
    }
  }
}

TEST(TrendSeries, IncrementalConsistency) {
  const auto corpus = random_corpus(5, 60, 30, 0.3);
  const auto full = trend_cumulative(build_counters(corpus), 1, {1, 30}, kOptions);
  const auto inst = trend_instant(build_counters(corpus), 7, {1, 30}, kOptions);
  for (DayIndex T = 1; T <= 30; ++T) {
    std::vector<TweetRecord> prefix;
    for (const auto& r : corpus) {
      if (r.day->t <= T) prefix.push_back(r);
    }
    const auto t = build_counters(prefix);
    EXPECT_EQ(evaluate_cumulative(t, {1, T}, kOptions).counts,
              full.points[static_cast<std::size_t>(T - 1)].counts);
    EXPECT_EQ(evaluate_instant(t, {7, T}, kOptions).counts,
              inst.points[static_cast<std::size_t>(T - 1)].counts);
  }
}

TEST(TrendSeries, ParallelEqualsSerial) {
  const auto t = build_counters(random_corpus(6, 300, 60, 0.2));
  auto opt = kOptions;
  const auto a = trend_cumulative(t, 1, {1, 60}, opt);
  opt.workers = 4;
  const auto b = trend_cumulative(t, 1, {1, 60}, opt);
  std::ostringstream x, y;
  write_trend_csv(x, a);
  write_trend_csv(y, b);
  EXPECT_EQ(x.str(), y.str());
}

TEST(Sweep, SpreadAndErrors) {
  const auto t = build_counters(random_corpus(7, 100, 60, 0.3));
  const auto one = sweep_t0(t, {1}, 60, kOptions);
  EXPECT_EQ(one.spread_ff, 0.0);
  EXPECT_EQ(one.spread_mp, 0.0);
  const auto many = sweep_t0(t, {1, 31, 41}, 60, kOptions);
  ASSERT_EQ(many.series.size(), 3u);
  EXPECT_EQ(many.series[1].t0, 31);
  EXPECT_EQ(many.series[1].points.front().day, 31);
  EXPECT_EQ(many.series[1].points.back().day, 60);
  double lo = 1e9, hi = -1e9;
  for (const auto& s : many.series) {
    lo = std::min(lo, *s.points.back().pct_ff);
    hi = std::max(hi, *s.points.back().pct_ff);
  }
  EXPECT_DOUBLE_EQ(many.spread_ff, hi - lo);
  EXPECT_THROW(sweep_t0(t, {61}, 60, kOptions), UsageError);
  EXPECT_THROW(sweep_t0(t, {}, 60, kOptions), UsageError);
}

TEST(Sweep, OpinionFlipSpreadsOrigins) {
  // everyone talks FF for 30 days, then MP for 30 days
  std::vector<TweetRecord> c;
  for (int u = 0; u < 20; ++u) {
    std::vector<int> ff(30, 1), mp(60, 0);
    for (int d = 30; d < 60; ++d) mp[static_cast<std::size_t>(d)] = 1;
    add_series(c, "u" + std::to_string(u), F, ff);
    add_series(c, "u" + std::to_string(u), M, mp);
  }
  const auto s = sweep_t0(build_counters(c), {1, 31}, 45, kOptions);
  EXPECT_GE(s.spread_ff, 99.0);
}

TEST(Weights, Examples) {
  std::vector<TweetRecord> c;
  add_series(c, "a1", F, {1});
  add_series(c, "a2", F, {1});
  add_series(c, "a3", M, {1});
  add_series(c, "b1", M, {1});
  const auto t = build_counters(c);
  const StrataAssignment strata(t, {{"a1", "a"}, {"a2", "a"}, {"a3", "a"}, {"b1", "b"}});
  auto opt = kOptions;
  opt.strata = &strata;
  const auto p = evaluate_cumulative(t, {1, 1}, opt);
  EXPECT_NEAR(*p.pct_ff, 50.0, 1e-12);

  const auto w = apply_demographic_weights(p, {{"a", 1.0}, {"b", 2.0}});
  EXPECT_NEAR(*w.pct_ff, 40.0, 1e-12);
  ASSERT_TRUE(w.unweighted);
  EXPECT_EQ(*w.unweighted, p.counts);
  EXPECT_NEAR(*p.pct_ff, 50.0, 1e-12);  // input untouched

  const auto ones = apply_demographic_weights(p, {{"a", 1.0}, {"b", 1.0}});
  EXPECT_DOUBLE_EQ(*ones.pct_ff, *p.pct_ff);
  // reweighting a weighted point starts from the raw counts
  EXPECT_NEAR(*apply_demographic_weights(w, {{"a", 1.0}, {"b", 1.0}}).pct_ff, 50.0, 1e-12);

  EXPECT_THROW(apply_demographic_weights(p, {{"a", -1.0}, {"b", 1.0}}), UsageError);
  EXPECT_THROW(apply_demographic_weights(p, {{"a", 1.0}}), UsageError);
}

TEST(Weights, DoublingPureFfStratumRaisesFf) {
  std::vector<TweetRecord> c;
  add_series(c, "f1", F, {1});
  add_series(c, "f2", F, {1});
  add_series(c, "m1", M, {1});
  add_series(c, "x", T3, {1});
  const auto t = build_counters(c);
  const StrataAssignment strata(t, {{"f1", "young"}, {"f2", "young"}, {"m1", "old"}});
  auto opt = kOptions;
  opt.strata = &strata;
  const auto p = evaluate_cumulative(t, {1, 1}, opt);
  const auto w = apply_demographic_weights(p, {{"young", 2.0}, {"old", 1.0}});
  EXPECT_GT(*w.pct_ff, *p.pct_ff);
  EXPECT_NEAR(*w.pct_ff + *w.pct_mp + *w.pct_others, 100.0, 1e-9);
}

TEST(Csv, Format) {
  std::vector<TweetRecord> c;
  add_series(c, "A", M, {1});
  add_series(c, "B", F, {1, 1});
  add_series(c, "C", T3, {1});
  const auto s = trend_cumulative(build_counters(c), 1, {1, 2}, kOptions);
  std::ostringstream out;
  write_trend_csv(out, s);
  EXPECT_EQ(out.str(),
            "date,T,n_mp,n_ff,n_undecided,n_unclassified,pct_ff,pct_mp,pct_others,denominator\n"
            "2019-03-01,1,1,1,0,1,33.3333,33.3333,33.3333,3\n"
            "2019-03-02,2,1,1,0,1,33.3333,33.3333,33.3333,3\n");
}
