#include "electrend/hashtag_graph.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "electrend/errors.hpp"
#include "electrend/io.hpp"
#include "electrend/parallel.hpp"

namespace electrend {
namespace {

// tags never contain this separator (hashtags are word characters only)
constexpr char kPairSep = '\x1f';

std::string pair_key(const std::string& a, const std::string& b) {
  return a < b ? a + kPairSep + b : b + kPairSep + a;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

CooccurrenceGraph::CooccurrenceGraph(
    std::map<std::string, std::uint64_t> frequencies,
    std::map<std::pair<std::string, std::string>, std::uint64_t> pairs) {
  nodes_.reserve(frequencies.size());
  for (auto& [tag, f] : frequencies) nodes_.push_back({tag, f});
  adjacency_.resize(nodes_.size());
  for (const auto& [ab, w] : pairs) {
    if (w == 0) continue;
    std::size_t a = find(ab.first);
    std::size_t b = find(ab.second);
    if (a == npos || b == npos) throw UsageError("edge references an unknown tag");
    if (a == b) throw UsageError("self-edges are not allowed: " + ab.first);
    if (a > b) std::swap(a, b);
    edges_.push_back({a, b, w});
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& x, const Edge& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  // merge duplicates arising from (b, a) spellings
  std::vector<Edge> merged;
  for (const auto& e : edges_) {
    if (!merged.empty() && merged.back().a == e.a && merged.back().b == e.b) {
      merged.back().weight += e.weight;
    } else {
      merged.push_back(e);
    }
  }
  edges_ = std::move(merged);
  for (const auto& e : edges_) {
    adjacency_[e.a].emplace_back(e.b, e.weight);
    adjacency_[e.b].emplace_back(e.a, e.weight);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

std::size_t CooccurrenceGraph::find(std::string_view tag) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), tag,
                                   [](const Node& n, std::string_view t) { return n.tag < t; });
  if (it == nodes_.end() || it->tag != tag) return npos;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::uint64_t CooccurrenceGraph::weight(std::string_view a, std::string_view b) const {
  const std::size_t ia = find(a);
  const std::size_t ib = find(b);
  if (ia == npos || ib == npos || ia == ib) return 0;
  const auto& adj = adjacency_[ia];
  const auto it = std::lower_bound(adj.begin(), adj.end(), std::make_pair(ib, std::uint64_t{0}));
  return (it != adj.end() && it->first == ib) ? it->second : 0;
}

CooccurrenceGraph build_graph(std::span<const TweetRecord> corpus, const GraphOptions& options) {
  // group by user so both tweet-level and user-level counting shard by user
  std::unordered_map<std::string_view, std::size_t> user_index;
  std::vector<std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto [it, inserted] = user_index.emplace(corpus[i].user_id, by_user.size());
    if (inserted) by_user.emplace_back();
    by_user[it->second].push_back(i);
  }

  struct Shard {
    std::unordered_map<std::string, std::uint64_t> nodes;
    std::unordered_map<std::string, std::uint64_t> pairs;
  };
  const unsigned workers = resolve_workers(options.workers);
  std::vector<Shard> shards(shard_count(by_user.size(), workers));
  parallel_shards(by_user.size(), workers, [&](std::size_t s, std::size_t begin, std::size_t end) {
    auto& shard = shards[s];
    for (std::size_t u = begin; u < end; ++u) {
      std::unordered_set<std::string> seen_tags;
      std::unordered_set<std::string> seen_pairs;
      for (const std::size_t i : by_user[u]) {
        const auto& tags = corpus[i].hashtags;
        for (std::size_t x = 0; x < tags.size(); ++x) {
          if (!options.dedup_users || seen_tags.insert(tags[x]).second) ++shard.nodes[tags[x]];
          for (std::size_t y = x + 1; y < tags.size(); ++y) {
            if (tags[x] == tags[y]) continue;
            auto key = pair_key(tags[x], tags[y]);
            if (options.dedup_users && !seen_pairs.insert(key).second) continue;
            ++shard.pairs[std::move(key)];
          }
        }
      }
    }
  });

  std::map<std::string, std::uint64_t> nodes;
  std::unordered_map<std::string, std::uint64_t> pairs;
  for (auto& shard : shards) {
    for (auto& [tag, n] : shard.nodes) nodes[tag] += n;
    for (auto& [key, n] : shard.pairs) pairs[key] += n;
  }
  std::erase_if(nodes, [&](const auto& kv) { return kv.second < options.min_count; });
  std::map<std::pair<std::string, std::string>, std::uint64_t> kept;
  for (const auto& [key, n] : pairs) {
    if (n < options.min_count) continue;
    const auto sep = key.find(kPairSep);
    std::string a = key.substr(0, sep);
    std::string b = key.substr(sep + 1);
    if (nodes.count(a) == 0 || nodes.count(b) == 0) continue;
    kept.emplace(std::make_pair(std::move(a), std::move(b)), n);
  }
  return CooccurrenceGraph(std::move(nodes), std::move(kept));
}

double modularity(const CooccurrenceGraph& graph, const std::vector<int>& camp_of) {
  double m = 0;
  for (const auto& e : graph.edges()) m += static_cast<double>(e.weight);
  if (m == 0) return 0.0;
  std::map<int, double> inside;
  std::map<int, double> degree;
  for (const auto& e : graph.edges()) {
    const double w = static_cast<double>(e.weight);
    degree[camp_of[e.a]] += w;
    degree[camp_of[e.b]] += w;
    if (camp_of[e.a] == camp_of[e.b]) inside[camp_of[e.a]] += w;
  }
  double q = 0;
  for (const auto& [c, d] : degree) {
    const double frac = d / (2 * m);
    q += inside[c] / m - frac * frac;
  }
  return q;
}

namespace {

std::vector<std::size_t> propagate_labels(const CooccurrenceGraph& graph, int max_iterations,
                                          int& iterations) {
  const std::size_t n = graph.node_count();
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), std::size_t{0});
  std::vector<std::uint64_t> self_weight(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& [u, w] : graph.neighbors(v)) self_weight[v] = std::max(self_weight[v], w);
  }

  std::vector<std::size_t> previous;
  std::vector<std::size_t> next(n);
  std::vector<std::pair<std::size_t, std::uint64_t>> votes;
  iterations = 0;
  while (iterations < max_iterations) {
    ++iterations;
    for (std::size_t v = 0; v < n; ++v) {
      votes.clear();
      votes.emplace_back(label[v], self_weight[v]);
      for (const auto& [u, w] : graph.neighbors(v)) votes.emplace_back(label[u], w);
      std::sort(votes.begin(), votes.end());
      std::size_t best = label[v];
      std::uint64_t best_weight = 0;
      for (std::size_t i = 0; i < votes.size();) {
        std::uint64_t total = 0;
        std::size_t j = i;
        for (; j < votes.size() && votes[j].first == votes[i].first; ++j) total += votes[j].second;
        // labels are visited in ascending order, so strict '>' keeps the smallest on ties
        if (total > best_weight || (i == 0 && total == 0)) {
          best = votes[i].first;
          best_weight = total;
        }
        i = j;
      }
      next[v] = best;
    }
    if (next == label) break;
    // a synchronous 2-cycle will not resolve; keep the current state
    if (next == previous) break;
    previous = label;
    label = next;
  }
  return label;
}

std::vector<std::size_t> merge_by_modularity(const CooccurrenceGraph& graph,
                                             std::vector<std::size_t> label) {
  double m = 0;
  for (const auto& e : graph.edges()) m += static_cast<double>(e.weight);
  if (m == 0) return label;
  while (true) {
    std::map<std::size_t, double> degree;
    std::map<std::pair<std::size_t, std::size_t>, double> between;
    for (std::size_t v = 0; v < label.size(); ++v) degree[label[v]];
    for (const auto& e : graph.edges()) {
      const double w = static_cast<double>(e.weight);
      const std::size_t a = label[e.a];
      const std::size_t b = label[e.b];
      degree[a] += w;
      degree[b] += w;
      if (a != b) between[{std::min(a, b), std::max(a, b)}] += w;
    }
    double best_gain = 1e-12;
    std::pair<std::size_t, std::size_t> best{0, 0};
    bool found = false;
    for (const auto& [ab, w] : between) {
      const double gain = w / m - 2.0 * degree[ab.first] * degree[ab.second] / (4.0 * m * m);
      if (gain > best_gain) {
        best_gain = gain;
        best = ab;
        found = true;
      }
    }
    if (!found) break;
    for (auto& l : label) {
      if (l == best.second) l = best.first;
    }
  }
  return label;
}

}  // namespace

CampPartition partition(const CooccurrenceGraph& graph, const PartitionOptions& options) {
  CampPartition result;
  if (graph.empty()) return result;
  auto label = propagate_labels(graph, options.max_iterations, result.iterations);
  if (options.modularity_refinement) label = merge_by_modularity(graph, std::move(label));

  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t v = 0; v < label.size(); ++v) members[label[v]].push_back(v);
  struct Community {
    std::size_t key;
    std::uint64_t frequency;
    std::vector<std::size_t> nodes;
  };
  std::vector<Community> communities;
  for (auto& [key, nodes] : members) {
    std::uint64_t f = 0;
    for (const auto v : nodes) f += graph.nodes()[v].frequency;
    communities.push_back({nodes.front(), f, std::move(nodes)});
  }
  std::sort(communities.begin(), communities.end(), [](const auto& a, const auto& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.key < b.key;
  });

  result.camp_of.assign(graph.node_count(), 0);
  for (std::size_t c = 0; c < communities.size(); ++c) {
    auto& com = communities[c];
    CampSummary summary;
    summary.camp = static_cast<int>(c);
    summary.size = com.nodes.size();
    summary.total_frequency = com.frequency;
    for (const auto v : com.nodes) result.camp_of[v] = static_cast<int>(c);
    std::sort(com.nodes.begin(), com.nodes.end(), [&](std::size_t a, std::size_t b) {
      const auto fa = graph.nodes()[a].frequency;
      const auto fb = graph.nodes()[b].frequency;
      return fa != fb ? fa > fb : a < b;
    });
    for (std::size_t i = 0; i < com.nodes.size() && i < options.top_tags; ++i) {
      summary.top_tags.push_back(graph.nodes()[com.nodes[i]].tag);
    }
    result.camps.push_back(std::move(summary));
  }
  return result;
}

std::map<StanceLabel, std::vector<CloudEntry>> camp_clouds(std::span<const TweetRecord> corpus,
                                                           std::size_t top_k) {
  std::map<StanceLabel, std::unordered_map<std::string, std::uint64_t>> counts;
  for (const auto label : kStanceLabels) counts[label];
  for (const auto& r : corpus) {
    auto& bucket = counts[r.stance.value_or(StanceLabel::Neutral)];
    for (const auto& tag : r.hashtags) ++bucket[tag];
  }
  std::map<StanceLabel, std::vector<CloudEntry>> clouds;
  for (auto& [label, bucket] : counts) {
    auto& cloud = clouds[label];
    cloud.reserve(bucket.size());
    for (auto& [tag, n] : bucket) cloud.push_back({tag, n});
    std::sort(cloud.begin(), cloud.end(), [](const CloudEntry& a, const CloudEntry& b) {
      return a.count != b.count ? a.count > b.count : a.tag < b.tag;
    });
    if (top_k != 0 && cloud.size() > top_k) cloud.resize(top_k);
  }
  return clouds;
}

void write_graphml(std::ostream& out, const CooccurrenceGraph& graph, const CampPartition* camps) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
         "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
         "  <key id=\"frequency\" for=\"node\" attr.name=\"frequency\" attr.type=\"long\"/>\n"
         "  <key id=\"camp\" for=\"node\" attr.name=\"camp\" attr.type=\"int\"/>\n"
         "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n"
         "  <graph id=\"hashtags\" edgedefault=\"undirected\">\n";
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    const auto& node = graph.nodes()[v];
    out << "    <node id=\"n" << v << "\">"
        << "<data key=\"label\">" << xml_escape(node.tag) << "</data>"
        << "<data key=\"frequency\">" << node.frequency << "</data>";
    if (camps) out << "<data key=\"camp\">" << camps->camp_of[v] << "</data>";
    out << "</node>\n";
  }
  for (std::size_t i = 0; i < graph.edges().size(); ++i) {
    const auto& e = graph.edges()[i];
    out << "    <edge id=\"e" << i << "\" source=\"n" << e.a << "\" target=\"n" << e.b << "\">"
        << "<data key=\"weight\">" << e.weight << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

void write_dot(std::ostream& out, const CooccurrenceGraph& graph, const CampPartition* camps) {
  out << "graph hashtags {\n";
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    const auto& node = graph.nodes()[v];
    out << "  " << dot_quote(node.tag) << " [frequency=" << node.frequency;
    if (camps) out << ", camp=" << camps->camp_of[v];
    out << "];\n";
  }
  for (const auto& e : graph.edges()) {
    out << "  " << dot_quote(graph.nodes()[e.a].tag) << " -- " << dot_quote(graph.nodes()[e.b].tag)
        << " [weight=" << e.weight << "];\n";
  }
  out << "}\n";
}

void write_clouds_csv(std::ostream& out,
                      const std::map<StanceLabel, std::vector<CloudEntry>>& clouds) {
  out << "camp,rank,tag,count\n";
  for (const auto label : kStanceLabels) {
    const auto it = clouds.find(label);
    if (it == clouds.end()) continue;
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      out << to_string(label) << ',' << (i + 1) << ',' << io::csv_field(it->second[i].tag) << ','
          << it->second[i].count << '\n';
    }
  }
}

void write_camps_csv(std::ostream& out, const CooccurrenceGraph& graph, const CampPartition& camps) {
  out << "tag,camp,frequency\n";
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    out << io::csv_field(graph.nodes()[v].tag) << ',' << camps.camp_of[v] << ','
        << graph.nodes()[v].frequency << '\n';
  }
}

}  // namespace electrend
