#include <benchmark/benchmark.h>

#include "electrend/counters.hpp"
#include "electrend/stance.hpp"
#include "electrend/synth.hpp"
#include "electrend/trend.hpp"

using namespace electrend;

namespace {

// Labels a synthetic corpus with its intended stances and day indices.
std::vector<TweetRecord> labeled_corpus(std::size_t users, int days) {
  ElectorateSpec spec;
  spec.n_users = users;
  spec.days = days;
  auto e = generate(spec);
  for (std::size_t i = 0; i < e.corpus.size(); ++i) {
    auto& r = e.corpus[i];
    const Date d = std::chrono::floor<std::chrono::days>(r.created_at);
    r.day = DayStamp{day_index(spec.start, d), d};
    r.stance = e.tweet_labels[i];
  }
  return std::move(e.corpus);
}

const std::vector<TweetRecord>& corpus() {
  static const auto c = labeled_corpus(10000, 180);
  return c;
}

void BM_BuildCounters(benchmark::State& state) {
  const auto& c = corpus();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_counters(c, static_cast<unsigned>(state.range(0))));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * c.size()));
}
BENCHMARK(BM_BuildCounters)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_TrendInstant(benchmark::State& state) {
  const auto table = build_counters(corpus());
  for (auto _ : state) {
    benchmark::DoNotOptimize(trend_instant(table, 14, DayRange{1, 180}));
  }
}
BENCHMARK(BM_TrendInstant)->Unit(benchmark::kMillisecond);

void BM_TrendCumulative(benchmark::State& state) {
  const auto table = build_counters(corpus());
  for (auto _ : state) {
    benchmark::DoNotOptimize(trend_cumulative(table, 1, DayRange{1, 180}));
  }
}
BENCHMARK(BM_TrendCumulative)->Unit(benchmark::kMillisecond);

void BM_SweepT0(benchmark::State& state) {
  const auto table = build_counters(corpus());
  const std::vector<DayIndex> t0s = {1, 31, 61, 91, 121};
  for (auto _ : state) benchmark::DoNotOptimize(sweep_t0(table, t0s, 180));
}
BENCHMARK(BM_SweepT0)->Unit(benchmark::kMillisecond);

}  // namespace
