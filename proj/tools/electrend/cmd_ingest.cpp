#include <memory>

#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "electrend/bot_filter.hpp"
#include "electrend/errors.hpp"
#include "electrend/ingest.hpp"
#include "electrend/io.hpp"

namespace electrend::cli {

namespace {

struct IngestArgs {
  std::string input;
  std::string output;
  std::string queries;
  bool no_query_filter = false;
  bool exclude_retweets = false;
  std::string origin;
  int day_offset_hours = 0;
  BotRules bots;
  bool no_bot_filter = false;
  std::string bot_report;
  std::string rejects;
};

void run_ingest(const IngestArgs& a, const CLI::App& app) {
  IngestOptions options;
  if (a.no_query_filter) {
    options.queries = QuerySet();
  } else if (!a.queries.empty()) {
    options.queries = QuerySet::load(a.queries);
  } else {
    options.queries = QuerySet::argentina_2019();
  }
  options.exclude_retweets = a.exclude_retweets;
  options.day_offset_hours = a.day_offset_hours;
  if (!a.origin.empty()) {
    options.origin = parse_date(a.origin);
    if (!options.origin) throw UsageError("--origin expects YYYY-MM-DD, got '" + a.origin + "'");
  }
  a.bots.validate();

  auto result = ingest_file(a.input, options);
  const std::string rejects = a.rejects.empty() ? a.input + ".rejects.txt" : a.rejects;
  {
    io::AtomicFile file(rejects);
    write_rejections(file.stream(), result.rejections);
    file.commit();
  }
  spdlog::info("ingest: {} lines, {} accepted, {} rejected (see {})", result.lines,
               result.records.size(), result.rejections.size(), rejects);
  if (result.records.empty()) {
    throw DataError("no records accepted from " + a.input + "; see " + rejects);
  }

  std::vector<TweetRecord> clean;
  std::vector<BotVerdict> report;
  if (a.no_bot_filter) {
    clean = std::move(result.records);
  } else {
    auto filtered = filter_corpus(std::move(result.records), a.bots);
    spdlog::info("bot filter: removed {} users and {} records", filtered.removed_users(),
                 filtered.removed_records);
    clean = std::move(filtered.clean);
    report = std::move(filtered.report);
  }
  if (clean.empty()) throw DataError("corpus is empty after bot filtering");

  write_corpus(a.output, clean);
  RunManifest manifest("ingest");
  manifest.add_input("corpus", a.input);
  if (!a.queries.empty()) manifest.add_input("queries", a.queries);
  record_params(manifest, app);
  manifest.set_origin(format_date(result.origin));
  manifest.set_corpus_digest(io::sha256_file(a.input));
  manifest.add_output("corpus", a.output);
  manifest.add_output("rejects", rejects);
  if (!a.no_bot_filter) {
    const std::string path = a.bot_report.empty() ? a.output + ".bots.csv" : a.bot_report;
    io::AtomicFile file(path);
    write_bot_report(file.stream(), report);
    file.commit();
    manifest.add_output("bot_report", path);
  }
  manifest.save(manifest_path_for(a.output));
  spdlog::info("wrote {} records to {} (origin {})", clean.size(), a.output,
               format_date(result.origin));
}

}  // namespace

Command make_ingest(CLI::App& parent) {
  auto args = std::make_shared<IngestArgs>();
  auto* app = parent.add_subcommand(
      "ingest", "Parse raw JSONL, filter by query, assign days, remove bots");
  app->add_option("input", args->input, "Raw JSONL corpus (.gz accepted)")->required();
  app->add_option("-o,--output", args->output, "Ingested JSONL corpus")->required();
  app->add_option("--queries", args->queries,
                  "Query file, one expression per line (default: built-in candidate queries)");
  app->add_flag("--no-query-filter", args->no_query_filter, "Accept records matching no query");
  app->add_flag("--exclude-retweets", args->exclude_retweets, "Drop 'RT @' records");
  app->add_option("--origin", args->origin,
                  "Date of day 1, YYYY-MM-DD (default: earliest accepted record)");
  app->add_option("--day-offset-hours", args->day_offset_hours,
                  "Shift applied to timestamps before taking calendar days")
      ->check(CLI::Range(-23, 23));
  app->add_option("--bot-threshold", args->bots.threshold, "Score at or above which a user is a bot")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--bot-rate-cap", args->bots.rate_cap, "Rate rule: tweets in one day above this")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--bot-dup-cap", args->bots.duplicate_cap,
                  "Duplication rule: duplicate text ratio above this")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--bot-gap-floor", args->bots.gap_floor,
                  "Burst rule: mean seconds between tweets below this")
      ->check(CLI::NonNegativeNumber);
  app->add_flag("--no-bot-filter", args->no_bot_filter, "Keep every user");
  app->add_option("--bot-report", args->bot_report, "Bot report CSV (default: <output>.bots.csv)");
  app->add_option("--rejects", args->rejects, "Rejected-line report (default: <input>.rejects.txt)");
  return {app, [args, app] { run_ingest(*args, *app); }};
}

}  // namespace electrend::cli
