#include <memory>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "electrend/errors.hpp"
#include "electrend/io.hpp"
#include "electrend/parallel.hpp"
#include "electrend/trend.hpp"

namespace electrend::cli {

namespace {

CorpusCounters load_table(const std::string& input, unsigned workers) {
  auto counters = stream_counters(input, workers);
  if (counters.table.user_count() == 0) throw DataError("corpus " + input + " is empty");
  spdlog::info("counters: {} records, {} users, {} user-days, days {}..{}", counters.records,
               counters.table.user_count(), counters.table.entry_count(),
               counters.table.first_day(), counters.table.last_day());
  return counters;
}

struct TrendArgs {
  std::string input;
  std::string output;
  std::string mode = "cumulative";
  int window = 14;
  std::string t0 = "1";
  std::string from;
  std::string to;
  std::string denominator = "include-undecided";
  std::string weights_file;
  std::string strata_file;
  unsigned workers = 0;
};

void run_trend(const TrendArgs& a, const CLI::App& app) {
  if (!a.weights_file.empty() && a.strata_file.empty()) {
    throw UsageError("--weights-file requires --strata-file");
  }
  const auto counters = load_table(a.input, a.workers);
  const auto& table = counters.table;
  const bool instant = a.mode == "instant";

  TrendOptions options;
  options.origin = *counters.origin;
  options.workers = resolve_workers(a.workers);
  options.denominator = a.denominator == "decided-only" ? InstantDenominator::DecidedOnly
                                                        : InstantDenominator::IncludeUndecided;
  std::optional<StrataAssignment> strata;
  if (!a.strata_file.empty()) {
    strata.emplace(table, load_strata(a.strata_file));
    options.strata = &*strata;
  }

  const DayIndex t0 = resolve_day(a.t0, counters.origin, "--t0");
  DayRange range;
  range.first = a.from.empty() ? (instant ? table.first_day() : std::max(t0, table.first_day()))
                               : resolve_day(a.from, counters.origin, "--from");
  range.last = a.to.empty() ? table.last_day() : resolve_day(a.to, counters.origin, "--to");
  if (!instant && range.first < t0) {
    throw UsageError(fmt::format("--from day {} precedes --t0 day {}", range.first, t0));
  }
  if (range.last < range.first) {
    throw UsageError(fmt::format("empty day range {}..{}", range.first, range.last));
  }

  if (instant) {
    WindowConfig{a.window, range.last}.validate();
  }
  auto series = instant ? trend_instant(table, a.window, range, options)
                        : trend_cumulative(table, t0, range, options);
  if (!a.weights_file.empty()) {
    const auto weights = load_weights(a.weights_file);
    for (auto& p : series.points) p = apply_demographic_weights(p, weights);
  }

  io::AtomicFile file(a.output);
  write_trend_csv(file.stream(), series);
  file.commit();

  const auto& last = series.points.back();
  if (last.is_null()) {
    spdlog::warn("final day {} has an empty denominator", format_date(last.date));
  } else {
    spdlog::info("{} {}: FF {:.2f}% MP {:.2f}% others {:.2f}% of {}", to_string(series.mode),
                 format_date(last.date), *last.pct_ff, *last.pct_mp, *last.pct_others,
                 last.denominator);
  }

  RunManifest manifest("trend");
  manifest.add_input("corpus", a.input);
  if (!a.weights_file.empty()) manifest.add_input("weights", a.weights_file);
  if (!a.strata_file.empty()) manifest.add_input("strata", a.strata_file);
  record_params(manifest, app);
  manifest.add_param("resolved.t0", std::to_string(t0));
  manifest.add_param("resolved.from", std::to_string(range.first));
  manifest.add_param("resolved.to", std::to_string(range.last));
  manifest.set_origin(format_date(*counters.origin));
  manifest.set_corpus_digest(io::sha256_file(a.input));
  manifest.add_output("trend", a.output);
  manifest.save(manifest_path_for(a.output));
}

struct SweepArgs {
  std::string input;
  std::string output_dir;
  std::vector<std::string> t0_list;
  std::string final_day;
  unsigned workers = 0;
};

void run_sweep(const SweepArgs& a, const CLI::App& app) {
  const auto counters = load_table(a.input, a.workers);
  const auto& table = counters.table;
  const Date origin = *counters.origin;

  std::vector<DayIndex> t0s;
  for (const auto& s : a.t0_list) t0s.push_back(resolve_day(s, origin, "--t0-list"));
  const DayIndex final_day =
      a.final_day.empty() ? table.last_day() : resolve_day(a.final_day, origin, "--final");

  TrendOptions options;
  options.origin = origin;
  options.workers = resolve_workers(a.workers);
  const auto sweep = sweep_t0(table, t0s, final_day, options);

  const std::filesystem::path dir(a.output_dir);
  RunManifest manifest("sweep");
  manifest.add_input("corpus", a.input);
  record_params(manifest, app);
  manifest.add_param("resolved.t0_list", fmt::format("{}", fmt::join(t0s, ",")));
  manifest.add_param("resolved.final", std::to_string(final_day));
  manifest.set_origin(format_date(origin));
  manifest.set_corpus_digest(io::sha256_file(a.input));

  for (const auto& s : sweep.series) {
    const auto path = dir / fmt::format("trend_t0_{}.csv", format_date(date_of_day(origin, s.t0)));
    io::AtomicFile file(path);
    write_trend_csv(file.stream(), s);
    file.commit();
    manifest.add_output(fmt::format("t0_{}", s.t0), path);
  }
  const auto summary = dir / "sweep_summary.csv";
  {
    io::AtomicFile file(summary);
    write_sweep_summary_csv(file.stream(), sweep, origin);
    file.commit();
  }
  manifest.add_output("summary", summary);
  manifest.save(dir / "sweep.manifest");
  spdlog::info("sweep: {} origins, final day {}, spread FF {:.2f} MP {:.2f} points", t0s.size(),
               format_date(date_of_day(origin, final_day)), sweep.spread_ff, sweep.spread_mp);
}

}  // namespace

Command make_trend(CLI::App& parent) {
  auto args = std::make_shared<TrendArgs>();
  auto* app = parent.add_subcommand("trend", "Daily instantaneous or cumulative trend CSV");
  app->add_option("input", args->input, "Classified JSONL corpus")->required();
  app->add_option("-o,--output", args->output, "Trend CSV")->required();
  app->add_option("--mode", args->mode, "instant (trailing window) or cumulative (from t0)")
      ->check(CLI::IsMember({"instant", "cumulative"}));
  app->add_option("--window", args->window, "Instant window length in days")
      ->check(CLI::PositiveNumber);
  app->add_option("--t0", args->t0, "Cumulative origin: YYYY-MM-DD or day index");
  app->add_option("--from", args->from,
                  "First reported day (default: t0 for cumulative, first active day for instant)");
  app->add_option("--to", args->to, "Last reported day (default: last active day)");
  app->add_option("--instant-denominator", args->denominator,
                  "Instant denominator: include-undecided or decided-only")
      ->check(CLI::IsMember({"include-undecided", "decided-only"}));
  app->add_option("--weights-file", args->weights_file, "CSV stratum,weight");
  app->add_option("--strata-file", args->strata_file, "CSV user_id,stratum");
  add_workers_option(*app, args->workers);
  return {app, [args, app] { run_trend(*args, *app); }};
}

Command make_sweep(CLI::App& parent) {
  auto args = std::make_shared<SweepArgs>();
  auto* app = parent.add_subcommand("sweep", "Cumulative trends from several origins t0");
  app->add_option("input", args->input, "Classified JSONL corpus")->required();
  app->add_option("-o,--output-dir", args->output_dir, "Directory for per-t0 CSVs and summary")
      ->required();
  app->add_option("--t0-list", args->t0_list, "Comma-separated origins (dates or day indices)")
      ->required()
      ->delimiter(',');
  app->add_option("--final", args->final_day, "Final day (default: last active day)");
  add_workers_option(*app, args->workers);
  return {app, [args, app] { run_sweep(*args, *app); }};
}

}  // namespace electrend::cli
