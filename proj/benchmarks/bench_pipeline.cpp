#include <sstream>

#include <benchmark/benchmark.h>

#include "electrend/ingest.hpp"
#include "electrend/stance.hpp"
#include "electrend/synth.hpp"

using namespace electrend;

namespace {

const SyntheticElectorate& electorate() {
  static const auto e = [] {
    ElectorateSpec spec;
    spec.n_users = 5000;
    spec.days = 60;
    return generate(spec);
  }();
  return e;
}

void BM_Ingest(benchmark::State& state) {
  std::string text;
  for (const auto& r : electorate().corpus) text += serialize_record(r) + '\n';
  IngestOptions opt;
  opt.queries = QuerySet::argentina_2019();
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(ingest_stream(in, opt));
  }
  state.SetItemsProcessed(
      static_cast<std::int64_t>(state.iterations() * electorate().corpus.size()));
}
BENCHMARK(BM_Ingest)->Unit(benchmark::kMillisecond);

void BM_Train(benchmark::State& state) {
  const auto seeds = SeedSet::argentina_2019();
  for (auto _ : state) benchmark::DoNotOptimize(train_from_seeds(electorate().corpus, seeds));
}
BENCHMARK(BM_Train)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto model = train_from_seeds(electorate().corpus, SeedSet::argentina_2019());
  auto corpus = electorate().corpus;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        classify_corpus(corpus, model, static_cast<unsigned>(state.range(0))));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * corpus.size()));
}
BENCHMARK(BM_Classify)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace
