#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "electrend/tweet.hpp"

namespace electrend {

struct GraphOptions {
  /// Nodes and edges whose count falls below this are pruned after counting.
  std::uint64_t min_count = 5;
  /// Count distinct users instead of tweets, damping power users and bots.
  bool dedup_users = false;
  unsigned workers = 1;
};

/// Undirected weighted hashtag co-occurrence graph in canonical form: nodes sorted
/// by tag, edges sorted by (a, b) with a < b.
class CooccurrenceGraph {
 public:
  struct Node {
    std::string tag;
    std::uint64_t frequency = 0;
  };
  struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;
    std::uint64_t weight = 0;
  };

  CooccurrenceGraph() = default;
  /// Builds from raw counts; pairs must name known tags. Used by tests and loaders.
  CooccurrenceGraph(std::map<std::string, std::uint64_t> frequencies,
                    std::map<std::pair<std::string, std::string>, std::uint64_t> pairs);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  /// Index of `tag`, or npos.
  std::size_t find(std::string_view tag) const;
  /// 0 when absent; symmetric in its arguments.
  std::uint64_t weight(std::string_view a, std::string_view b) const;
  /// (neighbor, weight) pairs sorted by neighbor index.
  const std::vector<std::pair<std::size_t, std::uint64_t>>& neighbors(std::size_t node) const {
    return adjacency_[node];
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<std::size_t, std::uint64_t>>> adjacency_;
};

CooccurrenceGraph build_graph(std::span<const TweetRecord> corpus, const GraphOptions& options = {});

struct CampSummary {
  int camp = 0;
  std::size_t size = 0;
  std::uint64_t total_frequency = 0;
  std::vector<std::string> top_tags;  // by frequency, then tag
};

struct CampPartition {
  /// Camp id per graph node; camps are numbered by descending total frequency.
  std::vector<int> camp_of;
  std::vector<CampSummary> camps;
  int iterations = 0;
  std::size_t camp_count() const noexcept { return camps.size(); }
};

struct PartitionOptions {
  int max_iterations = 100;
  /// Greedy modularity-increasing merge of label-propagation communities.
  bool modularity_refinement = false;
  std::size_t top_tags = 10;
};

/// Synchronous weighted label propagation. Every node starts with its own tag as
/// label and votes for its current label with the weight of its strongest edge;
/// ties go to the lexicographically smallest label. Deterministic for a given graph.
CampPartition partition(const CooccurrenceGraph& graph, const PartitionOptions& options = {});

/// Newman modularity of an assignment.
double modularity(const CooccurrenceGraph& graph, const std::vector<int>& camp_of);

struct CloudEntry {
  std::string tag;
  std::uint64_t count = 0;
  bool operator==(const CloudEntry&) const = default;
};

/// Per stance label, tags ranked by frequency (ties by tag) among that label's
/// tweets. Records without a stance count as Neutral. top_k == 0 keeps all tags.
std::map<StanceLabel, std::vector<CloudEntry>> camp_clouds(std::span<const TweetRecord> corpus,
                                                           std::size_t top_k = 0);

void write_graphml(std::ostream& out, const CooccurrenceGraph& graph, const CampPartition* camps);
void write_dot(std::ostream& out, const CooccurrenceGraph& graph, const CampPartition* camps);
/// camp,rank,tag,count
void write_clouds_csv(std::ostream& out, const std::map<StanceLabel, std::vector<CloudEntry>>& clouds);
/// tag,camp,frequency
void write_camps_csv(std::ostream& out, const CooccurrenceGraph& graph, const CampPartition& camps);

}  // namespace electrend
