#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <zlib.h>

#include <gtest/gtest.h>

#include "electrend/errors.hpp"
#include "electrend/ingest.hpp"
#include "fixtures.hpp"

using namespace electrend;
using electrend::testing::TempDir;
using electrend::testing::tweet;

TEST(QuerySet, ConjunctionAndDisjunction) {
  const QuerySet af({"Alberto AND Fernandez"});
  EXPECT_TRUE(matches_query(tweet("1", "u", "2019-03-01T00:00:00Z", "Alberto Fernandez habló hoy"), af));
  EXPECT_FALSE(matches_query(tweet("1", "u", "2019-03-01T00:00:00Z", "Fernandez habló"), af));
  EXPECT_TRUE(matches_query(tweet("1", "u", "2019-03-01T00:00:00Z", "FERNÁNDEZ y alberto"), af));
  const QuerySet mm({"mauriciomacri"});
  EXPECT_TRUE(matches_query(tweet("1", "u", "2019-03-01T00:00:00Z", "dijo @mauriciomacri"), mm));
}

TEST(QuerySet, DefaultQueries) {
  const auto qs = QuerySet::argentina_2019();
  EXPECT_EQ(qs.size(), 10u);
  for (const char* text : {"alferdez", "La CFK", "Kirchner", "macri", "Pichetto", "lavagna",
                           "@CFKArgentina", "@MiguelPichetto"}) {
    EXPECT_TRUE(qs.matches(text)) << text;
  }
  EXPECT_FALSE(qs.matches("Fernandez sin nombre"));
  const auto singles = qs.single_terms();
  EXPECT_NE(std::find(singles.begin(), singles.end(), "mauriciomacri"), singles.end());
}

TEST(QuerySet, Monotone) {
  std::mt19937 rng(3);
  const std::vector<std::string> pool = {"macri", "alberto AND fernandez", "lavagna", "cfk",
                                         "pichetto AND macri", "kirchner"};
  const std::vector<std::string> texts = {"Macri", "alberto", "Alberto Fernández", "nada",
                                          "pichetto", "CFK y Lavagna", "Kirchner Macri"};
  for (int trial = 0; trial < 50; ++trial) {
    QuerySet qs;
    for (int k = 0; k < 4; ++k) {
      std::vector<bool> before;
      for (const auto& t : texts) before.push_back(qs.matches(t));
      qs.add(pool[rng() % pool.size()]);
      for (std::size_t i = 0; i < texts.size(); ++i) {
        if (before[i]) EXPECT_TRUE(qs.matches(texts[i]));
      }
    }
  }
}

TEST(QuerySet, RejectsEmptyExpression) {
  EXPECT_THROW(QuerySet({"  "}), UsageError);
  EXPECT_THROW(QuerySet({"macri AND"}), UsageError);
}

TEST(AssignDay, OriginBoundaries) {
  const Date origin = *parse_date("2019-03-01");
  EXPECT_EQ(assign_day(tweet("1", "u", "2019-03-01T00:00:00Z", "x"), origin), 1);
  EXPECT_EQ(assign_day(tweet("1", "u", "2019-03-14T23:59:59Z", "x"), origin), 14);
  EXPECT_THROW(assign_day(tweet("1", "u", "2019-02-28T23:59:59Z", "x"), origin), DataError);
  // Argentine local day: 02:00Z on the 2nd is still the 1st at -3h
  EXPECT_EQ(assign_day(tweet("1", "u", "2019-03-02T02:00:00Z", "x"), origin, -3), 1);
}

TEST(AssignDay, OrderPreserving) {
  const Date origin = *parse_date("2019-03-01");
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> sec(0, 200LL * 86400);
  const auto base = std::chrono::sys_seconds(origin);
  for (int i = 0; i < 1000; ++i) {
    auto a = base + std::chrono::seconds(sec(rng));
    auto b = base + std::chrono::seconds(sec(rng));
    if (b < a) std::swap(a, b);
    TweetRecord ra, rb;
    ra.created_at = a;
    rb.created_at = b;
    EXPECT_LE(assign_day(ra, origin), assign_day(rb, origin));
  }
}

namespace {

std::string line(const std::string& id, const std::string& user, const std::string& ts,
                 const std::string& text) {
  return R"({"id":")" + id + R"(","user":")" + user + R"(","ts":")" + ts + R"(","text":")" +
         text + R"("})";
}

}  // namespace

TEST(Ingestor, EveryLineAccountedFor) {
  std::stringstream in;
  in << line("1", "a", "2019-03-01T10:00:00Z", "Macri hoy") << '\n'
     << "garbage\n"
     << '\n'
     << line("2", "b", "2019-03-02T10:00:00Z", "nada que ver") << '\n'
     << line("3", "c", "2019-13-40", "Macri") << '\n'
     << line("4", "d", "2019-03-03T10:00:00Z", "RT @x: Macri") << '\n'
     << line("1", "a", "2019-03-01T10:00:00Z", "Macri hoy") << '\n'
     << line("5", "e", "2019-03-05T10:00:00Z", "CFK") << '\n';
  IngestOptions opt;
  opt.queries = QuerySet::argentina_2019();
  opt.exclude_retweets = true;
  const auto r = ingest_stream(in, opt);
  EXPECT_EQ(r.lines, 8u);
  EXPECT_EQ(r.records.size() + r.rejections.size(), r.lines);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].tweet_id, "1");
  EXPECT_EQ(r.records[0].day->t, 1);
  EXPECT_EQ(r.records[1].day->t, 5);
  EXPECT_EQ(format_date(r.origin), "2019-03-01");
  std::vector<std::size_t> lines;
  for (const auto& rej : r.rejections) {
    lines.push_back(rej.line);
    EXPECT_FALSE(rej.reason.empty());
  }
  EXPECT_EQ(lines, (std::vector<std::size_t>{2, 3, 4, 5, 6, 7}));
}

TEST(Ingestor, RetweetsCountByDefault) {
  std::stringstream in;
  in << line("4", "d", "2019-03-03T10:00:00Z", "RT @x: Macri") << '\n';
  const auto r = ingest_stream(in, IngestOptions{});
  EXPECT_EQ(r.records.size(), 1u);
}

TEST(Ingestor, ConfiguredOriginRejectsEarlierRecords) {
  std::stringstream in;
  in << line("1", "a", "2019-02-28T23:59:59Z", "x") << '\n'
     << line("2", "a", "2019-03-01T00:00:00Z", "x") << '\n';
  IngestOptions opt;
  opt.origin = parse_date("2019-03-01");
  const auto r = ingest_stream(in, opt);
  ASSERT_EQ(r.records.size(), 1u);
  ASSERT_EQ(r.rejections.size(), 1u);
  EXPECT_EQ(r.rejections[0].line, 1u);
  EXPECT_NE(r.rejections[0].reason.find("before origin"), std::string::npos);
}

TEST(Ingestor, OrderIndependent) {
  std::vector<std::string> lines;
  for (int i = 0; i < 200; ++i) {
    lines.push_back(line(std::to_string(i % 170), "u" + std::to_string(i % 13),
                         "2019-03-" + std::string(i % 28 < 9 ? "0" : "") +
                             std::to_string(i % 28 + 1) + "T1" + std::to_string(i % 10) +
                             ":00:00Z",
                         "Macri " + std::to_string(i % 7)));
  }
  auto run = [&](const std::vector<std::string>& ls) {
    Ingestor ing(IngestOptions{});
    for (std::size_t i = 0; i < ls.size(); ++i) ing.add_line(ls[i], i + 1);
    auto r = ing.finish();
    std::string out;
    for (const auto& rec : r.records) out += serialize_record(rec) + "\n";
    return out;
  };
  const auto reference = run(lines);
  std::mt19937 rng(5);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(lines.begin(), lines.end(), rng);
    EXPECT_EQ(run(lines), reference);
  }
}

TEST(Ingestor, GzipInput) {
  TempDir dir;
  const auto path = dir / "in.jsonl.gz";
  const std::string body = line("1", "a", "2019-03-01T10:00:00Z", "Macri") + "\n" +
                           line("2", "b", "2019-03-02T10:00:00Z", "CFK") + "\n";
  gzFile gz = gzopen(path.c_str(), "wb");
  gzwrite(gz, body.data(), static_cast<unsigned>(body.size()));
  gzclose(gz);
  const auto r = ingest_file(path, IngestOptions{});
  EXPECT_EQ(r.records.size(), 2u);
  EXPECT_THROW(ingest_file(dir / "missing.jsonl", IngestOptions{}), InputError);
}
