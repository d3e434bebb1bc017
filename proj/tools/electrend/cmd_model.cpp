#include <fstream>
#include <memory>

#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "electrend/errors.hpp"
#include "electrend/io.hpp"
#include "electrend/parallel.hpp"
#include "electrend/stance.hpp"

namespace electrend::cli {

namespace {

struct TrainArgs {
  std::string input;
  std::string seeds;
  std::string output;
  double smoothing = 1.0;
  double margin = 0.0;
  unsigned workers = 0;
};

void run_train(const TrainArgs& a, const CLI::App& app) {
  const SeedSet seeds = a.seeds.empty() ? SeedSet::argentina_2019() : SeedSet::load(a.seeds);
  const auto corpus = read_corpus(a.input);
  if (corpus.empty()) throw DataError("training corpus " + a.input + " is empty");

  TrainOptions options;
  options.smoothing = a.smoothing;
  options.decision_margin = a.margin;
  options.workers = resolve_workers(a.workers);
  TrainingStats stats;
  const auto model = train_from_seeds(corpus, seeds, options, &stats);
  spdlog::info("train: {} tweets, pseudo-labeled FF={} MP={} Third={} ({:.1f}%), vocabulary {}",
               stats.tweets, stats.pseudo_labeled[0], stats.pseudo_labeled[1],
               stats.pseudo_labeled[2], 100.0 * stats.coverage(), stats.vocabulary);

  io::AtomicFile file(a.output);
  model.save(file.stream());
  file.commit();

  RunManifest manifest("train");
  manifest.add_input("corpus", a.input);
  if (!a.seeds.empty()) manifest.add_input("seeds", a.seeds);
  record_params(manifest, app);
  if (corpus.front().day) manifest.set_origin(format_date(record_origin(corpus.front())));
  manifest.set_corpus_digest(io::sha256_file(a.input));
  manifest.add_output("model", a.output);
  manifest.save(manifest_path_for(a.output));
}

struct ClassifyArgs {
  std::string input;
  std::string model;
  std::string output;
  std::optional<double> margin;
  std::size_t batch = 65536;
  unsigned workers = 0;
};

void run_classify(const ClassifyArgs& a, const CLI::App& app) {
  std::ifstream model_in(a.model);
  if (!model_in) throw InputError("cannot open model '" + a.model + "'");
  auto model = LexiconModel::load(model_in);
  if (a.margin) {
    if (*a.margin < 0) throw UsageError("--margin must be >= 0");
    model.set_decision_margin(*a.margin);
  }
  const unsigned workers = resolve_workers(a.workers);

  io::AtomicFile file(a.output);
  auto& out = file.stream();
  std::map<StanceLabel, std::size_t> counts;
  std::size_t total = 0;
  std::optional<Date> origin;
  std::vector<std::string> lines;
  for_each_batch(a.input, a.batch, [&](std::vector<TweetRecord>& batch) {
    const auto summary = classify_corpus(batch, model, workers);
    for (const auto& [label, n] : summary.counts) counts[label] += n;
    total += summary.total;
    lines.assign(batch.size(), {});
    parallel_shards(batch.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) lines[i] = serialize_record(batch[i]);
    });
    for (const auto& l : lines) out << l << '\n';
    if (!origin && batch.front().day) origin = record_origin(batch.front());
  });
  if (total == 0) throw DataError("corpus " + a.input + " is empty");
  file.commit();

  spdlog::info("classify: {} tweets: ProFF={} ProMP={} ProThird={} Neutral={}", total,
               counts[StanceLabel::ProFF], counts[StanceLabel::ProMP],
               counts[StanceLabel::ProThird], counts[StanceLabel::Neutral]);

  RunManifest manifest("classify");
  manifest.add_input("corpus", a.input);
  manifest.add_input("model", a.model);
  record_params(manifest, app);
  if (origin) manifest.set_origin(format_date(*origin));
  manifest.set_corpus_digest(io::sha256_file(a.input));
  manifest.add_output("corpus", a.output);
  manifest.save(manifest_path_for(a.output));
}

}  // namespace

Command make_train(CLI::App& parent) {
  auto args = std::make_shared<TrainArgs>();
  auto* app = parent.add_subcommand("train", "Bootstrap a stance lexicon from seed hashtags");
  app->add_option("input", args->input, "Ingested JSONL corpus")->required();
  app->add_option("--seeds", args->seeds,
                  "Seed file: '<camp>: tag tag ...' per line (default: built-in seeds)");
  app->add_option("-o,--output", args->output, "Model file")->required();
  app->add_option("--smoothing", args->smoothing, "Additive smoothing")
      ->check(CLI::PositiveNumber);
  app->add_option("--margin", args->margin, "Score margin a camp must win by")
      ->check(CLI::NonNegativeNumber);
  add_workers_option(*app, args->workers);
  return {app, [args, app] { run_train(*args, *app); }};
}

Command make_classify(CLI::App& parent) {
  auto args = std::make_shared<ClassifyArgs>();
  auto* app = parent.add_subcommand("classify", "Label every tweet with a stance");
  app->add_option("input", args->input, "Ingested JSONL corpus")->required();
  app->add_option("--model", args->model, "Model file written by train")->required();
  app->add_option("-o,--output", args->output, "Classified JSONL corpus")->required();
  app->add_option("--margin", args->margin, "Override the model's decision margin");
  app->add_option("--batch", args->batch, "Records held in memory at once")
      ->check(CLI::PositiveNumber);
  add_workers_option(*app, args->workers);
  return {app, [args, app] { run_classify(*args, *app); }};
}

}  // namespace electrend::cli
