#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "electrend/calendar.hpp"
#include "electrend/tweet.hpp"

namespace electrend {

/// Disjunction of conjunctive queries. "Alberto AND Fernandez" is one query with two
/// terms; a record matches when every term of some query occurs in its text.
/// Matching ignores case and Latin diacritics (Fernández matches Fernandez).
class QuerySet {
 public:
  QuerySet() = default;
  /// Each expression is split on the keyword AND (any case). Throws UsageError on
  /// empty expressions.
  explicit QuerySet(const std::vector<std::string>& expressions);

  /// The candidate-name queries used to collect the 2019 Argentine election corpus.
  static QuerySet argentina_2019();
  /// One query expression per line; blank lines and '#' comments ignored.
  static QuerySet load(const std::filesystem::path& path);

  void add(std::string_view expression);
  bool empty() const noexcept { return queries_.empty(); }
  std::size_t size() const noexcept { return queries_.size(); }
  /// Queries as written, for manifests.
  const std::vector<std::string>& expressions() const noexcept { return expressions_; }
  /// Lowercased terms of single-term queries (candidate handles such as "mauriciomacri").
  std::vector<std::string> single_terms() const;

  bool matches(std::string_view text) const;

 private:
  std::vector<std::string> expressions_;
  std::vector<std::vector<std::string>> queries_;  // search keys
};

bool matches_query(const TweetRecord& record, const QuerySet& queries);

/// Throws DataError when the record's local date precedes `origin`.
DayIndex assign_day(const TweetRecord& record, Date origin, int day_offset_hours = 0);

struct IngestOptions {
  /// Empty query set disables query filtering.
  QuerySet queries;
  bool exclude_retweets = false;
  /// Default: the earliest local date among accepted records.
  std::optional<Date> origin;
  int day_offset_hours = 0;
};

struct Rejection {
  std::size_t line = 0;
  std::string reason;
};

struct IngestResult {
  /// Accepted records with `day` assigned, sorted by (created_at, tweet_id).
  std::vector<TweetRecord> records;
  std::vector<Rejection> rejections;
  std::size_t lines = 0;
  Date origin{};
};

/// Line-oriented ingestion. Every line is either accepted or rejected with a
/// reason (lines == records.size() + rejections.size()). Duplicate tweet ids keep
/// the record whose serialized form sorts first, independent of input order.
class Ingestor {
 public:
  explicit Ingestor(IngestOptions options);

  void add_line(std::string_view line, std::size_t line_no);
  /// Assigns days and returns the accepted corpus. The ingestor is spent afterwards.
  IngestResult finish();

 private:
  IngestOptions options_;
  std::vector<std::pair<TweetRecord, std::size_t>> accepted_;
  std::vector<Rejection> rejections_;
  std::size_t lines_ = 0;
};

IngestResult ingest_stream(std::istream& in, const IngestOptions& options);
/// ".gz" inputs are decompressed. Throws InputError when unreadable.
IngestResult ingest_file(const std::filesystem::path& path, const IngestOptions& options);

/// Sidecar report: one "line<TAB>reason" per rejection, sorted by line.
void write_rejections(std::ostream& out, const std::vector<Rejection>& rejections);

/// The retweet convention of archived text: "RT @handle: ...".
bool is_retweet(std::string_view text);

}  // namespace electrend
