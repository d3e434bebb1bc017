#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "electrend/calendar.hpp"
#include "electrend/counters.hpp"
#include "electrend/manifest.hpp"
#include "electrend/tweet.hpp"

namespace electrend::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kInput = 3,
  kData = 4,
  kValidation = 5,
};

/// A validate run completed but at least one check failed.
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A subcommand: its CLI11 app plus the action to run once parsing succeeded.
struct Command {
  CLI::App* app = nullptr;
  std::function<void()> run;
};

void add_workers_option(CLI::App& app, unsigned& workers);

/// "YYYY-MM-DD" or a 1-based day index. Dates need `origin`.
DayIndex resolve_day(const std::string& arg, std::optional<Date> origin, std::string_view flag);

/// Parses every line of a pipeline-produced JSONL corpus. Malformed lines are data errors.
std::vector<TweetRecord> read_corpus(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& path, const std::vector<TweetRecord>& records);

/// Calls fn on consecutive batches of parsed records, at most `batch` per call.
void for_each_batch(const std::filesystem::path& path, std::size_t batch,
                    const std::function<void(std::vector<TweetRecord>&)>& fn);

struct CorpusCounters {
  CounterTable table;
  std::optional<Date> origin;
  std::size_t records = 0;
};

/// Streams a classified corpus into per-user counters without holding the records.
/// Requires every record to carry day and stance, with a single consistent origin.
CorpusCounters stream_counters(const std::filesystem::path& path, unsigned workers);

/// Origin implied by a dated record (date - (t - 1)).
Date record_origin(const TweetRecord& record);

/// Every option of `app` with its effective value, defaults included.
void record_params(RunManifest& manifest, const CLI::App& app);

std::filesystem::path manifest_path_for(const std::filesystem::path& output);

}  // namespace electrend::cli
