#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "electrend/errors.hpp"
#include "electrend/hashtag_graph.hpp"
#include "electrend/synth.hpp"
#include "fixtures.hpp"

using namespace electrend;
using electrend::testing::tweet;

namespace {

TweetRecord tagged(const std::string& id, const std::string& user, const std::string& text,
                   std::optional<StanceLabel> stance = std::nullopt) {
  auto r = tweet(id, user, "2019-03-01T00:00:00Z", text);
  r.stance = stance;
  return r;
}

GraphOptions no_pruning() {
  GraphOptions g;
  g.min_count = 1;
  return g;
}

}  // namespace

TEST(BuildGraph, TriangleFromOneTweet) {
  std::vector<TweetRecord> c = {tagged("1", "u", "#a #b #c")};
  const auto g = build_graph(c, no_pruning());
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edges().size(), 3u);
  EXPECT_EQ(g.weight("a", "b"), 1u);
  EXPECT_EQ(g.weight("c", "a"), 1u);
  EXPECT_EQ(g.weight("b", "c"), 1u);
}

TEST(BuildGraph, Accumulates) {
  std::vector<TweetRecord> c = {tagged("1", "u", "#a #b"), tagged("2", "v", "#A #b #B")};
  const auto g = build_graph(c, no_pruning());
  EXPECT_EQ(g.weight("a", "b"), 2u);
  EXPECT_EQ(g.weight("b", "a"), 2u);
  EXPECT_EQ(g.weight("a", "a"), 0u);
}

TEST(BuildGraph, FiveTweetBruteForce) {
  const std::vector<std::string> texts = {"#cfk #fuerzacristina #nestorvuelva",
                                          "#macri #cambiemos #mm2019 #cfk",
                                          "#cambiemos #mm2019", "#lavagna",
                                          "#fuerzacristina #cfk #NuncaMasMacri #cfk"};
  std::vector<TweetRecord> c;
  for (std::size_t i = 0; i < texts.size(); ++i) c.push_back(tagged(std::to_string(i), "u", texts[i]));
  const auto g = build_graph(c, no_pruning());

  std::map<std::string, std::uint64_t> freq;
  std::map<std::pair<std::string, std::string>, std::uint64_t> pairs;
  for (const auto& r : c) {
    const auto& h = r.hashtags;
    for (std::size_t i = 0; i < h.size(); ++i) {
      ++freq[h[i]];
      for (std::size_t j = 0; j < h.size(); ++j) {
        if (i < j) ++pairs[std::minmax(h[i], h[j])];
      }
    }
  }
  ASSERT_EQ(g.node_count(), freq.size());
  for (const auto& n : g.nodes()) EXPECT_EQ(n.frequency, freq.at(n.tag)) << n.tag;
  ASSERT_EQ(g.edges().size(), pairs.size());
  for (const auto& e : g.edges()) {
    const auto& a = g.nodes()[e.a].tag;
    const auto& b = g.nodes()[e.b].tag;
    EXPECT_LT(a, b);
    EXPECT_EQ(e.weight, pairs.at({a, b})) << a << "-" << b;
  }
  EXPECT_EQ(g.weight("cfk", "fuerzacristina"), 2u);
}

TEST(BuildGraph, Invariants) {
  std::mt19937 rng(1);
  std::vector<TweetRecord> c;
  for (int i = 0; i < 500; ++i) {
    std::string text;
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < n; ++k) text += fmt::format("#t{} ", rng() % 15);
    c.push_back(tagged(std::to_string(i), "u" + std::to_string(i % 20), text));
  }
  std::size_t prev_nodes = SIZE_MAX, prev_edges = SIZE_MAX;
  for (std::uint64_t min_count : {1, 3, 10, 30, 60}) {
    GraphOptions opt;
    opt.min_count = min_count;
    const auto g = build_graph(c, opt);
    EXPECT_LE(g.node_count(), prev_nodes);
    EXPECT_LE(g.edges().size(), prev_edges);
    prev_nodes = g.node_count();
    prev_edges = g.edges().size();
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      EXPECT_GE(g.nodes()[v].frequency, min_count);
      for (const auto& [u, w] : g.neighbors(v)) {
        EXPECT_NE(u, v);
        EXPECT_GE(w, min_count);
        EXPECT_GE(g.nodes()[v].frequency, w);
      }
    }
  }
  GraphOptions a = no_pruning(), b = no_pruning();
  b.workers = 4;
  std::ostringstream x, y;
  write_dot(x, build_graph(c, a), nullptr);
  write_dot(y, build_graph(c, b), nullptr);
  EXPECT_EQ(x.str(), y.str());
}

TEST(BuildGraph, DedupUsers) {
  std::vector<TweetRecord> c = {tagged("1", "power", "#a #b"), tagged("2", "power", "#a #b"),
                                tagged("3", "power", "#a #b"), tagged("4", "other", "#a #b")};
  auto opt = no_pruning();
  EXPECT_EQ(build_graph(c, opt).weight("a", "b"), 4u);
  opt.dedup_users = true;
  const auto g = build_graph(c, opt);
  EXPECT_EQ(g.weight("a", "b"), 2u);
  EXPECT_EQ(g.nodes()[g.find("a")].frequency, 2u);
}

TEST(Graph, RejectsSelfEdgeAndUnknownTag) {
  EXPECT_THROW(CooccurrenceGraph({{"a", 1}}, {{{"a", "a"}, 1}}), UsageError);
  EXPECT_THROW(CooccurrenceGraph({{"a", 1}}, {{{"a", "b"}, 1}}), UsageError);
}

TEST(Partition, DisconnectedCliques) {
  std::map<std::string, std::uint64_t> f;
  std::map<std::pair<std::string, std::string>, std::uint64_t> p;
  for (const char* t : {"a", "b", "c", "x", "y", "z"}) f[t] = 10;
  p[{"a", "b"}] = 3; p[{"a", "c"}] = 3; p[{"b", "c"}] = 3;
  p[{"x", "y"}] = 3; p[{"x", "z"}] = 3; p[{"y", "z"}] = 3;
  const CooccurrenceGraph g(f, p);
  const auto part = partition(g);
  EXPECT_EQ(part.camp_count(), 2u);
  EXPECT_EQ(part.camp_of[g.find("a")], part.camp_of[g.find("c")]);
  EXPECT_EQ(part.camp_of[g.find("x")], part.camp_of[g.find("z")]);
  EXPECT_NE(part.camp_of[g.find("a")], part.camp_of[g.find("x")]);
}

TEST(Partition, SingleNode) {
  const CooccurrenceGraph g({{"solo", 7}}, {});
  const auto part = partition(g);
  ASSERT_EQ(part.camp_count(), 1u);
  EXPECT_EQ(part.camps[0].top_tags, std::vector<std::string>{"solo"});
  EXPECT_TRUE(partition(CooccurrenceGraph{}).camps.empty());
}

namespace {

struct Planted {
  CooccurrenceGraph graph;
  std::map<std::string, int> block;
};

Planted planted_graph(std::uint64_t seed, int per_block) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0, 1);
  Planted out;
  std::vector<std::string> tags;
  std::map<std::string, std::uint64_t> freq;
  for (int b = 0; b < 3; ++b) {
    for (int i = 0; i < per_block; ++i) {
      const auto t = fmt::format("b{}t{:02d}", b, i);
      tags.push_back(t);
      out.block[t] = b;
    }
  }
  std::map<std::pair<std::string, std::string>, std::uint64_t> pairs;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    for (std::size_t j = i + 1; j < tags.size(); ++j) {
      const bool intra = out.block[tags[i]] == out.block[tags[j]];
      if (unit(rng) < (intra ? 0.6 : 0.05)) {
        const std::uint64_t w = intra ? 5 + rng() % 20 : 1 + rng() % 2;
        pairs[{tags[i], tags[j]}] = w;
        freq[tags[i]] += w;
        freq[tags[j]] += w;
      }
    }
  }
  for (const auto& t : tags) freq[t] += 1;
  out.graph = CooccurrenceGraph(freq, pairs);
  return out;
}

double purity(const Planted& p, const CampPartition& part) {
  std::map<int, std::map<int, int>> overlap;
  for (std::size_t v = 0; v < p.graph.node_count(); ++v) {
    ++overlap[part.camp_of[v]][p.block.at(p.graph.nodes()[v].tag)];
  }
  int hits = 0;
  for (const auto& [camp, blocks] : overlap) {
    int best = 0;
    for (const auto& [b, n] : blocks) best = std::max(best, n);
    hits += best;
  }
  return static_cast<double>(hits) / static_cast<double>(p.graph.node_count());
}

}  // namespace

TEST(Partition, PlantedThreeBlocks) {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto p = planted_graph(seed, 20);
    const auto part = partition(p.graph);
    EXPECT_GE(purity(p, part), 0.95) << "seed " << seed;
    PartitionOptions refined;
    refined.modularity_refinement = true;
    const auto r = partition(p.graph, refined);
    EXPECT_GE(purity(p, r), 0.95) << "seed " << seed;
    EXPECT_GE(modularity(p.graph, r.camp_of), modularity(p.graph, part.camp_of) - 1e-12);
  }
}

TEST(Partition, Deterministic) {
  const auto p = planted_graph(9, 15);
  const auto a = partition(p.graph);
  const auto b = partition(p.graph);
  EXPECT_EQ(a.camp_of, b.camp_of);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Clouds, Counts) {
  std::vector<TweetRecord> c = {
      tagged("1", "u", "#a #b", StanceLabel::ProFF), tagged("2", "u", "#a", StanceLabel::ProMP),
      tagged("3", "u", "#a #c", StanceLabel::ProMP), tagged("4", "u", "#c")};
  const auto clouds = camp_clouds(c);
  EXPECT_EQ(clouds.at(StanceLabel::ProFF),
            (std::vector<CloudEntry>{{"a", 1}, {"b", 1}}));
  EXPECT_EQ(clouds.at(StanceLabel::ProMP),
            (std::vector<CloudEntry>{{"a", 2}, {"c", 1}}));
  EXPECT_EQ(clouds.at(StanceLabel::Neutral), (std::vector<CloudEntry>{{"c", 1}}));
  EXPECT_EQ(camp_clouds(c, 1).at(StanceLabel::ProMP).size(), 1u);

  // exact marginals
  std::map<std::string, std::uint64_t> total;
  for (const auto& [label, cloud] : clouds) {
    for (const auto& e : cloud) total[e.tag] += e.count;
  }
  EXPECT_EQ(total, (std::map<std::string, std::uint64_t>{{"a", 3}, {"b", 1}, {"c", 2}}));
}

TEST(Clouds, CampVocabulariesGiveDisjointTopTen) {
  ElectorateSpec spec;
  spec.n_users = 1500;
  spec.days = 20;
  auto e = generate(spec);
  for (std::size_t i = 0; i < e.corpus.size(); ++i) e.corpus[i].stance = e.tweet_labels[i];
  const auto clouds = camp_clouds(e.corpus, 10);
  std::map<std::string, int> seen;
  for (const auto label : {StanceLabel::ProFF, StanceLabel::ProMP, StanceLabel::ProThird}) {
    ASSERT_EQ(clouds.at(label).size(), 10u);
    for (const auto& entry : clouds.at(label)) ++seen[entry.tag];
  }
  for (const auto& [tag, n] : seen) EXPECT_EQ(n, 1) << tag;
}

TEST(Export, GraphmlAndDot) {
  std::vector<TweetRecord> c = {tagged("1", "u", "#a #b"), tagged("2", "u", "#a #b")};
  const auto g = build_graph(c, no_pruning());
  const auto part = partition(g);
  std::ostringstream xml, dot, camps;
  write_graphml(xml, g, &part);
  write_dot(dot, g, &part);
  write_camps_csv(camps, g, part);
  EXPECT_NE(xml.str().find("<data key=\"weight\">2</data>"), std::string::npos) << xml.str();
  EXPECT_NE(xml.str().find("<data key=\"camp\">0</data>"), std::string::npos);
  EXPECT_NE(dot.str().find("graph"), std::string::npos);
  EXPECT_NE(dot.str().find("weight=2"), std::string::npos) << dot.str();
  EXPECT_EQ(camps.str(), "tag,camp,frequency\na,0,2\nb,0,2\n");
}
