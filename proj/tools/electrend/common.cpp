#include "common.hpp"

#include <charconv>

#include <fmt/format.h>

#include "electrend/errors.hpp"
#include "electrend/io.hpp"
#include "electrend/parallel.hpp"

namespace electrend::cli {

void add_workers_option(CLI::App& app, unsigned& workers) {
  app.add_option("--workers", workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
}

DayIndex resolve_day(const std::string& arg, std::optional<Date> origin, std::string_view flag) {
  if (auto d = parse_date(arg)) {
    if (!origin) throw UsageError(fmt::format("{} {}: corpus has no origin date", flag, arg));
    const DayIndex t = day_index(*origin, *d);
    if (t < 1) {
      throw UsageError(fmt::format("{} {} precedes the corpus origin {}", flag, arg,
                                   format_date(*origin)));
    }
    return t;
  }
  DayIndex t = 0;
  const auto* end = arg.data() + arg.size();
  const auto [ptr, ec] = std::from_chars(arg.data(), end, t);
  if (ec != std::errc{} || ptr != end || t < 1) {
    throw UsageError(
        fmt::format("{} expects YYYY-MM-DD or a day index >= 1, got '{}'", flag, arg));
  }
  return t;
}

namespace {

TweetRecord parse_pipeline_line(std::string_view line, std::size_t line_no,
                                const std::filesystem::path& path) {
  try {
    return parse_record(line, line_no);
  } catch (const ParseError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace

std::vector<TweetRecord> read_corpus(const std::filesystem::path& path) {
  std::vector<TweetRecord> out;
  io::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    out.push_back(parse_pipeline_line(line, line_no, path));
  });
  return out;
}

void write_corpus(const std::filesystem::path& path, const std::vector<TweetRecord>& records) {
  io::AtomicFile file(path);
  auto& out = file.stream();
  for (const auto& r : records) out << serialize_record(r) << '\n';
  file.commit();
}

void for_each_batch(const std::filesystem::path& path, std::size_t batch,
                    const std::function<void(std::vector<TweetRecord>&)>& fn) {
  io::LineReader reader(path);
  std::string line;
  std::vector<TweetRecord> records;
  records.reserve(batch);
  while (reader.next(line)) {
    if (line.empty()) continue;
    records.push_back(parse_pipeline_line(line, reader.line_number(), path));
    if (records.size() == batch) {
      fn(records);
      records.clear();
    }
  }
  if (!records.empty()) fn(records);
}

Date record_origin(const TweetRecord& record) {
  return record.day->date - std::chrono::days(record.day->t - 1);
}

CorpusCounters stream_counters(const std::filesystem::path& path, unsigned workers) {
  const unsigned w = resolve_workers(workers);
  std::vector<CounterTableBuilder> builders(w);
  CorpusCounters out;
  io::LineReader reader(path);
  std::string line;
  constexpr std::size_t kBatch = 1 << 16;
  std::vector<std::pair<std::string, std::size_t>> lines;
  lines.reserve(kBatch);

  auto flush = [&] {
    std::vector<std::optional<Date>> origins(w);
    parallel_shards(lines.size(), w, [&](std::size_t shard, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const auto r = parse_pipeline_line(lines[i].first, lines[i].second, path);
        if (!r.day || !r.stance) {
          throw DataError(fmt::format("{}: line {} has no {}; run ingest and classify first",
                                      path.string(), lines[i].second, r.day ? "stance" : "day"));
        }
        const Date o = record_origin(r);
        if (origins[shard] && *origins[shard] != o) {
          throw DataError(fmt::format("{}: line {} disagrees on the corpus origin",
                                      path.string(), lines[i].second));
        }
        origins[shard] = o;
        builders[shard].add(r);
      }
    });
    for (const auto& o : origins) {
      if (!o) continue;
      if (out.origin && *out.origin != *o) {
        throw DataError(fmt::format("{}: records disagree on the corpus origin", path.string()));
      }
      out.origin = o;
    }
    out.records += lines.size();
    lines.clear();
  };

  while (reader.next(line)) {
    if (line.empty()) continue;
    lines.emplace_back(std::move(line), reader.line_number());
    line = {};
    if (lines.size() == kBatch) flush();
  }
  flush();

  for (std::size_t i = 1; i < builders.size(); ++i) builders[0].merge(builders[i]);
  out.table = builders[0].snapshot();
  return out;
}

void record_params(RunManifest& manifest, const CLI::App& app) {
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "h") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (opt->get_type_size() == 0) {
        value = "true";
      } else {
        value = fmt::format("{}", fmt::join(results, ","));
      }
    } else if (opt->get_type_size() == 0) {
      value = "false";
    } else {
      value = opt->get_default_str();
    }
    manifest.add_param(name, value);
  }
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  auto p = output;
  p += ".manifest";
  return p;
}

}  // namespace electrend::cli
