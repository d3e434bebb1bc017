#include "electrend/ingest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "electrend/errors.hpp"
#include "electrend/io.hpp"
#include "electrend/text.hpp"

namespace electrend {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_and_terms(std::string_view expr) {
  // tokens separated by whitespace; a bare "AND" token separates terms
  std::vector<std::string> terms;
  std::string current;
  std::size_t pos = 0;
  auto flush = [&] {
    const auto t = trim(current);
    if (t.empty()) throw UsageError("query '" + std::string(expr) + "' has an empty AND operand");
    terms.push_back(text::search_key(t));
    current.clear();
  };
  while (pos < expr.size()) {
    const auto space = expr.find_first_of(" \t", pos);
    const auto word = expr.substr(pos, space == std::string_view::npos ? expr.size() - pos
                                                                      : space - pos);
    if (word == "AND" || word == "and" || word == "And") {
      flush();
    } else if (!word.empty()) {
      if (!current.empty()) current.push_back(' ');
      current.append(word);
    }
    if (space == std::string_view::npos) break;
    pos = space + 1;
  }
  if (trim(expr).empty()) return terms;
  flush();
  return terms;
}

}  // namespace

QuerySet::QuerySet(const std::vector<std::string>& expressions) {
  for (const auto& e : expressions) add(e);
}

QuerySet QuerySet::argentina_2019() {
  return QuerySet({"Alberto AND Fernandez", "alferdez", "CFK", "CFKArgentina", "Kirchner",
                   "mauriciomacri", "Macri", "Pichetto", "MiguelPichetto", "Lavagna"});
}

QuerySet QuerySet::load(const std::filesystem::path& path) {
  QuerySet qs;
  io::for_each_line(path, [&](std::string_view line, std::size_t) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') return;
    qs.add(t);
  });
  if (qs.empty()) throw UsageError("query file '" + path.string() + "' has no queries");
  return qs;
}

void QuerySet::add(std::string_view expression) {
  auto terms = split_and_terms(expression);
  if (terms.empty()) throw UsageError("empty query expression");
  expressions_.emplace_back(trim(expression));
  queries_.push_back(std::move(terms));
}

std::vector<std::string> QuerySet::single_terms() const {
  std::vector<std::string> out;
  for (const auto& q : queries_) {
    if (q.size() == 1 && q.front().find(' ') == std::string::npos) out.push_back(q.front());
  }
  return out;
}

bool QuerySet::matches(std::string_view raw_text) const {
  const std::string key = text::search_key(raw_text);
  return std::any_of(queries_.begin(), queries_.end(), [&](const auto& terms) {
    return std::all_of(terms.begin(), terms.end(),
                       [&](const std::string& term) { return key.find(term) != std::string::npos; });
  });
}

bool matches_query(const TweetRecord& record, const QuerySet& queries) {
  return queries.matches(record.text);
}

DayIndex assign_day(const TweetRecord& record, Date origin, int day_offset_hours) {
  const Date date = local_date(record.created_at, day_offset_hours);
  if (date < origin) {
    throw DataError("record " + record.tweet_id + " at " + format_timestamp(record.created_at) +
                    " precedes origin " + format_date(origin));
  }
  return day_index(origin, date);
}

bool is_retweet(std::string_view text) {
  return text.size() >= 4 && text.substr(0, 4) == "RT @";
}

Ingestor::Ingestor(IngestOptions options) : options_(std::move(options)) {}

void Ingestor::add_line(std::string_view line, std::size_t line_no) {
  ++lines_;
  if (trim(line).empty()) {
    rejections_.push_back({line_no, "empty line"});
    return;
  }
  TweetRecord rec;
  try {
    rec = parse_record(line, line_no);
  } catch (const ParseError& e) {
    rejections_.push_back({line_no, e.reason()});
    return;
  }
  // ingestion owns day assignment and classification happens later
  rec.day.reset();
  rec.stance.reset();
  if (options_.exclude_retweets && is_retweet(rec.text)) {
    rejections_.push_back({line_no, "retweet excluded"});
    return;
  }
  if (!options_.queries.empty() && !matches_query(rec, options_.queries)) {
    rejections_.push_back({line_no, "no query match"});
    return;
  }
  accepted_.emplace_back(std::move(rec), line_no);
}

IngestResult Ingestor::finish() {
  IngestResult result;
  result.lines = lines_;
  result.rejections = std::move(rejections_);

  // duplicate ids: keep the smallest serialized form so the survivor is order independent
  std::unordered_map<std::string, std::size_t> keep;
  keep.reserve(accepted_.size());
  std::vector<bool> dropped(accepted_.size(), false);
  for (std::size_t i = 0; i < accepted_.size(); ++i) {
    auto [it, inserted] = keep.emplace(accepted_[i].first.tweet_id, i);
    if (inserted) continue;
    const std::size_t j = it->second;
    const auto a = serialize_record(accepted_[i].first);
    const auto b = serialize_record(accepted_[j].first);
    const std::size_t loser = (a < b || (a == b && accepted_[i].second < accepted_[j].second)) ? j : i;
    if (loser == j) it->second = i;
    dropped[loser] = true;
    result.rejections.push_back(
        {accepted_[loser].second, "duplicate tweet id " + accepted_[loser].first.tweet_id});
  }

  std::optional<Date> origin = options_.origin;
  if (!origin) {
    for (std::size_t i = 0; i < accepted_.size(); ++i) {
      if (dropped[i]) continue;
      const Date d = local_date(accepted_[i].first.created_at, options_.day_offset_hours);
      if (!origin || d < *origin) origin = d;
    }
  }
  result.origin = origin.value_or(Date{});

  result.records.reserve(accepted_.size());
  for (std::size_t i = 0; i < accepted_.size(); ++i) {
    if (dropped[i]) continue;
    auto& [rec, line_no] = accepted_[i];
    const Date d = local_date(rec.created_at, options_.day_offset_hours);
    if (d < result.origin) {
      result.rejections.push_back({line_no, "before origin " + format_date(result.origin)});
      continue;
    }
    rec.day = DayStamp{day_index(result.origin, d), d};
    result.records.push_back(std::move(rec));
  }
  accepted_.clear();

  std::sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.tweet_id < b.tweet_id;
  });
  std::sort(result.rejections.begin(), result.rejections.end(),
            [](const auto& a, const auto& b) { return a.line < b.line; });
  return result;
}

IngestResult ingest_stream(std::istream& in, const IngestOptions& options) {
  Ingestor ingestor(options);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ingestor.add_line(line, ++line_no);
  }
  return ingestor.finish();
}

IngestResult ingest_file(const std::filesystem::path& path, const IngestOptions& options) {
  Ingestor ingestor(options);
  io::LineReader reader(path);
  std::string line;
  while (reader.next(line)) ingestor.add_line(line, reader.line_number());
  return ingestor.finish();
}

void write_rejections(std::ostream& out, const std::vector<Rejection>& rejections) {
  for (const auto& r : rejections) out << r.line << '\t' << r.reason << '\n';
}

}  // namespace electrend
