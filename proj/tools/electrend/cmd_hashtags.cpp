#include <memory>

#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "electrend/errors.hpp"
#include "electrend/hashtag_graph.hpp"
#include "electrend/io.hpp"
#include "electrend/parallel.hpp"

namespace electrend::cli {

namespace {

struct HashtagArgs {
  std::string input;
  std::string output_dir;
  std::uint64_t min_count = 5;
  std::size_t top_k = 20;
  bool dedup_users = false;
  bool modularity = false;
  int max_iterations = 100;
  unsigned workers = 0;
};

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  io::AtomicFile file(path);
  fn(file.stream());
  file.commit();
}

void run_hashtags(const HashtagArgs& a, const CLI::App& app) {
  const auto corpus = read_corpus(a.input);
  if (corpus.empty()) throw DataError("corpus " + a.input + " is empty");

  GraphOptions g;
  g.min_count = a.min_count;
  g.dedup_users = a.dedup_users;
  g.workers = resolve_workers(a.workers);
  const auto graph = build_graph(corpus, g);
  PartitionOptions p;
  p.max_iterations = a.max_iterations;
  p.modularity_refinement = a.modularity;
  const auto camps = partition(graph, p);
  const auto clouds = camp_clouds(corpus, a.top_k);
  if (graph.empty()) spdlog::warn("no hashtag reaches --min-count {}", a.min_count);
  spdlog::info("hashtags: {} nodes, {} edges, {} camps after {} iterations (modularity {:.3f})",
               graph.node_count(), graph.edges().size(), camps.camp_count(), camps.iterations,
               modularity(graph, camps.camp_of));

  const std::filesystem::path dir(a.output_dir);
  RunManifest manifest("hashtags");
  manifest.add_input("corpus", a.input);
  record_params(manifest, app);
  if (corpus.front().day) manifest.set_origin(format_date(record_origin(corpus.front())));
  manifest.set_corpus_digest(io::sha256_file(a.input));

  write_file(dir / "hashtags.graphml", [&](std::ostream& o) { write_graphml(o, graph, &camps); });
  write_file(dir / "hashtags.dot", [&](std::ostream& o) { write_dot(o, graph, &camps); });
  write_file(dir / "clouds.csv", [&](std::ostream& o) { write_clouds_csv(o, clouds); });
  write_file(dir / "camps.csv", [&](std::ostream& o) { write_camps_csv(o, graph, camps); });
  manifest.add_output("graphml", dir / "hashtags.graphml");
  manifest.add_output("dot", dir / "hashtags.dot");
  manifest.add_output("clouds", dir / "clouds.csv");
  manifest.add_output("camps", dir / "camps.csv");
  manifest.save(dir / "hashtags.manifest");
}

}  // namespace

Command make_hashtags(CLI::App& parent) {
  auto args = std::make_shared<HashtagArgs>();
  auto* app = parent.add_subcommand(
      "hashtags", "Hashtag co-occurrence graph, camp partition and per-stance clouds");
  app->add_option("input", args->input, "Ingested or classified JSONL corpus")->required();
  app->add_option("-o,--output-dir", args->output_dir, "Directory for graph and cloud files")
      ->required();
  app->add_option("--min-count", args->min_count, "Prune tags and edges counted fewer times")
      ->check(CLI::PositiveNumber);
  app->add_option("--top-k", args->top_k, "Tags per stance cloud (0 = all)");
  app->add_flag("--dedup-users", args->dedup_users, "Count distinct users instead of tweets");
  app->add_flag("--modularity", args->modularity,
                "Merge label-propagation camps while modularity improves");
  app->add_option("--max-iterations", args->max_iterations, "Label propagation rounds")
      ->check(CLI::PositiveNumber);
  add_workers_option(*app, args->workers);
  return {app, [args, app] { run_hashtags(*args, *app); }};
}

}  // namespace electrend::cli
