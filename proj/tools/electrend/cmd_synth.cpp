#include <memory>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "electrend/bot_filter.hpp"
#include "electrend/counters.hpp"
#include "electrend/errors.hpp"
#include "electrend/ingest.hpp"
#include "electrend/io.hpp"
#include "electrend/oracle.hpp"
#include "electrend/parallel.hpp"
#include "electrend/stance.hpp"
#include "electrend/synth.hpp"
#include "electrend/trend.hpp"

namespace electrend::cli {

namespace {

struct SpecOverrides {
  std::string spec;
  std::optional<std::size_t> n_users;
  std::optional<int> days;
  std::optional<std::uint64_t> seed;
  std::optional<double> crosstalk;
};

void add_spec_options(CLI::App& app, SpecOverrides& o) {
  app.add_option("--spec", o.spec, "Electorate spec file (default: built-in electorate)");
  app.add_option("--n-users", o.n_users, "Override the number of users");
  app.add_option("--days", o.days, "Override the number of days");
  app.add_option("--seed", o.seed, "Override the random seed");
  app.add_option("--crosstalk", o.crosstalk, "Override the cross-talk probability");
}

void record_spec(RunManifest& manifest, const ElectorateSpec& spec) {
  std::ostringstream text;
  write_spec(text, spec);
  std::istringstream lines(text.str());
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    manifest.add_param("spec." + line.substr(0, eq), line.substr(eq + 3));
  }
}

ElectorateSpec resolve_spec(const SpecOverrides& o) {
  ElectorateSpec spec = o.spec.empty() ? ElectorateSpec{} : load_spec(o.spec);
  if (o.n_users) spec.n_users = *o.n_users;
  if (o.days) spec.days = *o.days;
  if (o.seed) spec.seed = *o.seed;
  if (o.crosstalk) spec.crosstalk = *o.crosstalk;
  spec.validate();
  return spec;
}

struct SynthArgs {
  SpecOverrides spec;
  std::string output;
  std::string truth;
  unsigned workers = 0;
};

void run_synth(const SynthArgs& a, const CLI::App& app) {
  const auto spec = resolve_spec(a.spec);
  const auto world = generate(spec, resolve_workers(a.workers));
  write_corpus(a.output, world.corpus);
  const std::string truth = a.truth.empty() ? a.output + ".truth.csv" : a.truth;
  {
    io::AtomicFile file(truth);
    write_truth_csv(file.stream(), world.truth);
    file.commit();
  }
  const std::string spec_out = a.output + ".spec";
  {
    io::AtomicFile file(spec_out);
    write_spec(file.stream(), spec);
    file.commit();
  }
  spdlog::info("synth: run {}, {} users, {} days, {} tweets", world.truth.run_id, spec.n_users,
               spec.days, world.corpus.size());

  RunManifest manifest("synth");
  if (!a.spec.spec.empty()) manifest.add_input("spec", a.spec.spec);
  record_params(manifest, app);
  record_spec(manifest, spec);
  manifest.add_param("run_id", world.truth.run_id);
  manifest.set_origin(format_date(spec.start));
  manifest.set_corpus_digest(io::sha256_file(a.output));
  manifest.add_output("corpus", a.output);
  manifest.add_output("truth", truth);
  manifest.add_output("spec", spec_out);
  manifest.save(manifest_path_for(a.output));
}

struct ValidateArgs {
  SpecOverrides spec;
  std::string output_dir;
  double tolerance = 1.0;
  double min_accuracy = 0.95;
  unsigned workers = 0;
};

struct Checks {
  std::vector<std::pair<std::string, bool>> results;
  void add(std::string name, bool ok, const std::string& detail) {
    if (ok) {
      spdlog::info("check {}: PASS ({})", name, detail);
    } else {
      spdlog::error("check {}: FAIL ({})", name, detail);
    }
    results.emplace_back(std::move(name), ok);
  }
  bool all() const {
    for (const auto& r : results) {
      if (!r.second) return false;
    }
    return true;
  }
};

std::map<std::string, UserCategory> module_categories(const CounterTable& table,
                                                      const oracle::Mode& mode) {
  std::map<std::string, UserCategory> out;
  for (std::size_t u = 0; u < table.user_count(); ++u) {
    std::optional<UserCategory> c;
    if (const auto* i = std::get_if<oracle::Instant>(&mode)) {
      c = categorize_instant(table, u, WindowConfig{i->w, i->T});
    } else {
      const auto& m = std::get<oracle::Cumulative>(mode);
      c = categorize_cumulative(table, u, CumulativeConfig{m.T0, m.T});
    }
    if (c) out[table.user_id(u)] = *c;
  }
  return out;
}

void run_validate(const ValidateArgs& a, const CLI::App& app) {
  const auto spec = resolve_spec(a.spec);
  const unsigned workers = resolve_workers(a.workers);
  Checks checks;

  auto world = generate(spec, workers);
  spdlog::info("synth: run {}, {} users, {} days, {} tweets", world.truth.run_id, spec.n_users,
               spec.days, world.corpus.size());
  std::unordered_map<std::string, StanceLabel> intended;
  intended.reserve(world.corpus.size());
  for (std::size_t i = 0; i < world.corpus.size(); ++i) {
    intended.emplace(world.corpus[i].tweet_id, world.tweet_labels[i]);
  }

  IngestOptions ingest_options;
  ingest_options.queries = QuerySet::argentina_2019();
  ingest_options.origin = spec.start;
  Ingestor ingestor(ingest_options);
  std::size_t line_no = 0;
  for (const auto& r : world.corpus) ingestor.add_line(serialize_record(r), ++line_no);
  world.corpus = {};
  auto ingested = ingestor.finish();
  checks.add("ingest", ingested.rejections.empty(),
             fmt::format("{} accepted, {} rejected", ingested.records.size(),
                         ingested.rejections.size()));
  if (ingested.records.empty()) throw DataError("synthetic corpus is empty");

  auto filtered = filter_corpus(std::move(ingested.records), BotRules{});
  std::size_t planted = 0, caught = 0, false_alarms = 0;
  std::unordered_map<std::string, bool> is_bot;
  for (const auto& u : world.truth.users) is_bot[u.user_id] = u.is_bot;
  for (const auto& v : filtered.report) {
    if (is_bot[v.user_id]) {
      ++planted;
      if (v.is_bot) ++caught;
    } else if (v.is_bot) {
      ++false_alarms;
    }
  }
  checks.add("bot_filter", caught == planted && false_alarms == 0,
             fmt::format("{}/{} planted bots removed, {} humans removed", caught, planted,
                         false_alarms));
  auto corpus = std::move(filtered.clean);
  if (corpus.empty()) throw DataError("corpus is empty after bot filtering");

  TrainOptions train_options;
  train_options.workers = workers;
  const auto model = train_from_seeds(corpus, SeedSet::argentina_2019(), train_options);
  classify_corpus(corpus, model, workers);
  std::size_t correct = 0;
  for (const auto& r : corpus) {
    if (*r.stance == intended.at(r.tweet_id)) ++correct;
  }
  const double accuracy = static_cast<double>(correct) / static_cast<double>(corpus.size());
  checks.add("classifier", accuracy >= a.min_accuracy,
             fmt::format("accuracy {:.4f} over {} tweets", accuracy, corpus.size()));

  const auto table = build_counters(corpus, workers);
  const auto dense = oracle::count_records(corpus);
  const DayIndex last = table.last_day();
  std::vector<oracle::Mode> modes;
  for (DayIndex T : {DayIndex{1}, DayIndex{7}, DayIndex{14}, last / 2, last}) {
    if (T < 1) continue;
    modes.emplace_back(oracle::Instant{14, T});
    for (DayIndex t0 : {DayIndex{1}, last / 4 + 1, last / 2 + 1}) {
      if (t0 <= T) modes.emplace_back(oracle::Cumulative{t0, T});
    }
  }
  std::size_t agree = 0;
  for (const auto& m : modes) {
    if (module_categories(table, m) == oracle::categories(dense, m)) ++agree;
  }
  checks.add("oracle", agree == modes.size(),
             fmt::format("{}/{} configurations identical", agree, modes.size()));

  TrendOptions trend_options;
  trend_options.origin = spec.start;
  trend_options.workers = workers;
  trend_options.run_id = world.truth.run_id;
  const auto series = trend_cumulative(table, 1, {1, last}, trend_options);
  const auto report = recovery_report(series, world.truth);
  checks.add("recovery", report.max_final_error() <= a.tolerance,
             fmt::format("final-day error FF {:.3f} MP {:.3f} points", *report.final_error_ff,
                         *report.final_error_mp));

  if (!a.output_dir.empty()) {
    const std::filesystem::path dir(a.output_dir);
    RunManifest manifest("validate");
    if (!a.spec.spec.empty()) manifest.add_input("spec", a.spec.spec);
    record_params(manifest, app);
    record_spec(manifest, spec);
  manifest.add_param("run_id", world.truth.run_id);
    manifest.set_origin(format_date(spec.start));
    {
      io::AtomicFile file(dir / "trend_cumulative.csv");
      write_trend_csv(file.stream(), series);
      file.commit();
    }
    {
      io::AtomicFile file(dir / "recovery.csv");
      write_recovery_csv(file.stream(), report);
      file.commit();
    }
    manifest.add_output("trend", dir / "trend_cumulative.csv");
    manifest.add_output("recovery", dir / "recovery.csv");
    manifest.save(dir / "validate.manifest");
  }
  if (!checks.all()) throw ValidationFailure("validation failed");
}

}  // namespace

Command make_synth(CLI::App& parent) {
  auto args = std::make_shared<SynthArgs>();
  auto* app = parent.add_subcommand("synth", "Generate a synthetic electorate corpus");
  add_spec_options(*app, args->spec);
  app->add_option("-o,--output", args->output, "Corpus JSONL")->required();
  app->add_option("--truth", args->truth, "Truth CSV (default: <output>.truth.csv)");
  add_workers_option(*app, args->workers);
  return {app, [args, app] { run_synth(*args, *app); }};
}

Command make_validate(CLI::App& parent) {
  auto args = std::make_shared<ValidateArgs>();
  auto* app = parent.add_subcommand(
      "validate", "Synthesize, run the full pipeline and check it against ground truth");
  add_spec_options(*app, args->spec);
  app->add_option("-o,--output-dir", args->output_dir, "Write trend and recovery CSVs here");
  app->add_option("--tolerance", args->tolerance, "Allowed final-day error in points")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--min-accuracy", args->min_accuracy, "Required classifier accuracy")
      ->check(CLI::Range(0.0, 1.0));
  add_workers_option(*app, args->workers);
  return {app, [args, app] { run_validate(*args, *app); }};
}

}  // namespace electrend::cli
