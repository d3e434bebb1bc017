#include "electrend/stance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "electrend/errors.hpp"
#include "electrend/ingest.hpp"
#include "electrend/parallel.hpp"
#include "electrend/text.hpp"

namespace electrend {
namespace {

constexpr std::string_view kModelFormat = "electrend-lexicon";
constexpr int kModelVersion = 1;

std::size_t camp_index(Camp c) { return static_cast<std::size_t>(c); }

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

}  // namespace

void SeedSet::add(Camp camp, std::string_view tag) {
  if (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  if (tag.empty()) throw UsageError("empty seed tag");
  std::string key = text::lower(tag);
  const auto [it, inserted] = tags_.emplace(key, camp);
  if (!inserted && it->second != camp) {
    throw UsageError("seed tag '" + key + "' assigned to both " + std::string(to_string(it->second)) +
                     " and " + std::string(to_string(camp)));
  }
}

std::optional<Camp> SeedSet::camp_of(std::string_view tag) const {
  const auto it = tags_.find(std::string(tag));
  if (it == tags_.end()) return std::nullopt;
  return it->second;
}

std::size_t SeedSet::count(Camp camp) const {
  return static_cast<std::size_t>(std::count_if(
      tags_.begin(), tags_.end(), [camp](const auto& kv) { return kv.second == camp; }));
}

SeedSet SeedSet::argentina_2019() {
  SeedSet s;
  for (const char* tag : {"fuerzacristina", "nestorvuelva", "nestorpudo", "nuncamasmacri"}) {
    s.add(Camp::FF, tag);
  }
  for (const char* tag : {"cambiemos", "mm2019"}) s.add(Camp::MP, tag);
  s.add(Camp::Third, "lavagna");
  return s;
}

SeedSet SeedSet::parse(std::istream& in) {
  SeedSet s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::string camp_name;
    if (!(words >> camp_name) || camp_name.front() == '#') continue;
    if (camp_name.back() == ':') camp_name.pop_back();
    const auto camp = parse_camp(camp_name);
    if (!camp) {
      throw UsageError(fmt::format("seed file line {}: unknown camp '{}'", line_no, camp_name));
    }
    std::string tag;
    while (words >> tag) s.add(*camp, tag);
  }
  return s;
}

SeedSet SeedSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open seed file '" + path.string() + "'");
  return parse(in);
}

LexiconModel::LexiconModel(SeedSet seeds, std::vector<std::string> kept_handles, double smoothing,
                           double decision_margin)
    : seeds_(std::move(seeds)),
      handles_(std::move(kept_handles)),
      smoothing_(smoothing),
      margin_(decision_margin) {
  std::sort(handles_.begin(), handles_.end());
  handles_.erase(std::unique(handles_.begin(), handles_.end()), handles_.end());
  if (!(smoothing_ > 0.0)) throw UsageError("smoothing must be positive");
  if (!(margin_ >= 0.0)) throw UsageError("decision margin must be non-negative");
}

void LexiconModel::set_weights(std::string token, const Weights& w) {
  for (const double x : w) {
    if (!std::isfinite(x)) throw UsageError("non-finite weight for token '" + token + "'");
  }
  weights_[std::move(token)] = w;
}

const LexiconModel::Weights* LexiconModel::weights(std::string_view token) const {
  const auto it = weights_.find(token);
  return it == weights_.end() ? nullptr : &it->second;
}

std::vector<std::string> LexiconModel::tokenize(std::string_view s) const {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t\r\n", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t\r\n", start);
    if (end == std::string_view::npos) end = s.size();
    const std::string_view chunk = s.substr(start, end - start);
    pos = end;

    if (starts_with(chunk, "http://") || starts_with(chunk, "https://") ||
        starts_with(chunk, "www.")) {
      continue;
    }
    if (chunk.front() == '@') {
      auto handle = text::words(chunk.substr(1));
      if (!handle.empty() &&
          std::binary_search(handles_.begin(), handles_.end(), handle.front())) {
        tokens.push_back(std::move(handle.front()));
      }
      continue;
    }
    for (auto& w : text::words(chunk)) tokens.push_back(std::move(w));
  }
  return tokens;
}

LexiconModel::Weights LexiconModel::scores(std::string_view s) const {
  Weights total{};
  for (const auto& token : tokenize(s)) {
    if (const auto* w = weights(token)) {
      for (std::size_t c = 0; c < total.size(); ++c) total[c] += (*w)[c];
    }
  }
  return total;
}

std::vector<Camp> seed_camps(const TweetRecord& record, const SeedSet& seeds) {
  std::vector<Camp> camps;
  for (const auto& tag : record.hashtags) {
    if (const auto camp = seeds.camp_of(tag)) {
      if (std::find(camps.begin(), camps.end(), *camp) == camps.end()) camps.push_back(*camp);
    }
  }
  return camps;
}

StanceLabel LexiconModel::classify(const TweetRecord& record) const {
  const auto camps = seed_camps(record, seeds_);
  if (camps.size() == 1) return stance_for(camps.front());
  if (camps.size() > 1) return StanceLabel::Neutral;

  const Weights s = scores(record.text);
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < s.size(); ++c) {
    if (seeds_.size() == 0 || seeds_.count(static_cast<Camp>(c)) > 0) order.push_back(c);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s[a] != s[b] ? s[a] > s[b] : a < b;
  });
  if (order.size() == 1) return stance_for(static_cast<Camp>(order[0]));
  if (s[order[0]] - s[order[1]] > margin_) return stance_for(static_cast<Camp>(order[0]));
  return StanceLabel::Neutral;
}

void LexiconModel::save(std::ostream& out) const {
  out << kModelFormat << ' ' << kModelVersion << '\n';
  out << "smoothing " << fmt::format("{}", smoothing_) << '\n';
  out << "decision_margin " << fmt::format("{}", margin_) << '\n';
  for (const auto& h : handles_) out << "handle " << h << '\n';
  for (const auto& [tag, camp] : seeds_.tags()) out << "seed " << to_string(camp) << ' ' << tag << '\n';

  std::vector<const std::pair<const std::string, Weights>*> sorted;
  sorted.reserve(weights_.size());
  for (const auto& kv : weights_) sorted.push_back(&kv);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->first < b->first; });
  out << "vocabulary " << sorted.size() << '\n';
  for (const auto* kv : sorted) {
    out << "weight " << kv->first << ' '
        << fmt::format("{} {} {}", kv->second[0], kv->second[1], kv->second[2]) << '\n';
  }
}

LexiconModel LexiconModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty model file");
  {
    std::istringstream header(line);
    std::string format;
    int version = 0;
    header >> format >> version;
    if (format != kModelFormat) throw DataError("not a lexicon model file");
    if (version != kModelVersion) {
      throw DataError(fmt::format("unsupported model version {}", version));
    }
  }
  SeedSet seeds;
  std::vector<std::string> handles;
  double smoothing = 1.0;
  double margin = 0.0;
  std::vector<std::pair<std::string, Weights>> weights;
  std::size_t declared_vocab = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    std::string key;
    fields >> key;
    bool ok = true;
    if (key == "smoothing") {
      ok = static_cast<bool>(fields >> smoothing);
    } else if (key == "decision_margin") {
      ok = static_cast<bool>(fields >> margin);
    } else if (key == "handle") {
      std::string h;
      ok = static_cast<bool>(fields >> h);
      handles.push_back(h);
    } else if (key == "seed") {
      std::string camp_name, tag;
      ok = static_cast<bool>(fields >> camp_name >> tag);
      const auto camp = parse_camp(camp_name);
      ok = ok && camp.has_value();
      if (ok) seeds.add(*camp, tag);
    } else if (key == "vocabulary") {
      ok = static_cast<bool>(fields >> declared_vocab);
    } else if (key == "weight") {
      std::string token, a, b, c;
      ok = static_cast<bool>(fields >> token >> a >> b >> c);
      if (ok) weights.emplace_back(token, Weights{std::strtod(a.c_str(), nullptr),
                                                  std::strtod(b.c_str(), nullptr),
                                                  std::strtod(c.c_str(), nullptr)});
    } else {
      ok = false;
    }
    if (!ok) throw DataError(fmt::format("model file line {}: cannot parse '{}'", line_no, line));
  }
  if (weights.size() != declared_vocab) {
    throw DataError(fmt::format("model declares {} tokens but holds {}", declared_vocab,
                                weights.size()));
  }
  LexiconModel model(std::move(seeds), std::move(handles), smoothing, margin);
  for (auto& [token, w] : weights) model.set_weights(std::move(token), w);
  return model;
}

double TrainingStats::coverage() const {
  if (tweets == 0) return 0.0;
  std::size_t labeled = 0;
  for (const auto n : pseudo_labeled) labeled += n;
  return static_cast<double>(labeled) / static_cast<double>(tweets);
}

LexiconModel train_from_seeds(std::span<const TweetRecord> corpus, const SeedSet& seeds,
                              const TrainOptions& options, TrainingStats* stats) {
  std::size_t seeded = 0;
  for (const auto camp : kCamps) seeded += seeds.count(camp) > 0 ? 1 : 0;
  if (seeded < 2) throw UsageError("seed tags must cover at least two camps");
  LexiconModel model(seeds,
                     options.kept_handles.value_or(QuerySet::argentina_2019().single_terms()),
                     options.smoothing, options.decision_margin);

  using Counts = std::array<std::uint64_t, 3>;
  struct Shard {
    std::unordered_map<std::string, Counts> tokens;
    Counts tweets{};
  };
  const unsigned workers = resolve_workers(options.workers);
  std::vector<Shard> shards(shard_count(corpus.size(), workers));
  parallel_shards(corpus.size(), workers, [&](std::size_t s, std::size_t begin, std::size_t end) {
    auto& shard = shards[s];
    for (std::size_t i = begin; i < end; ++i) {
      const auto camps = seed_camps(corpus[i], seeds);
      if (camps.size() != 1) continue;
      const std::size_t c = camp_index(camps.front());
      ++shard.tweets[c];
      for (auto& token : model.tokenize(corpus[i].text)) ++shard.tokens[std::move(token)][c];
    }
  });

  std::unordered_map<std::string, Counts> counts;
  Counts tweets{};
  for (auto& shard : shards) {
    for (std::size_t c = 0; c < 3; ++c) tweets[c] += shard.tweets[c];
    if (counts.empty()) {
      counts = std::move(shard.tokens);
      continue;
    }
    for (auto& [token, n] : shard.tokens) {
      auto& dst = counts[token];
      for (std::size_t c = 0; c < 3; ++c) dst[c] += n[c];
    }
  }

  if (stats) {
    stats->tweets = corpus.size();
    for (std::size_t c = 0; c < 3; ++c) stats->pseudo_labeled[c] = tweets[c];
    stats->vocabulary = counts.size();
  }
  std::vector<std::string> missing;
  for (const auto camp : kCamps) {
    if (seeds.count(camp) > 0 && tweets[camp_index(camp)] == 0) {
      missing.emplace_back(to_string(camp));
    }
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw DataError("no pseudo-labeled tweets for camp(s): " + names);
  }

  Counts totals{};
  for (const auto& [token, n] : counts) {
    for (std::size_t c = 0; c < 3; ++c) totals[c] += n[c];
  }
  const std::uint64_t grand = totals[0] + totals[1] + totals[2];
  const double a = options.smoothing;
  const double av = a * static_cast<double>(counts.size());
  for (const auto& [token, n] : counts) {
    const std::uint64_t all = n[0] + n[1] + n[2];
    LexiconModel::Weights w{};
    for (std::size_t c = 0; c < 3; ++c) {
      // a camp without seeds has no training data and never competes
      if (seeds.count(static_cast<Camp>(c)) == 0) continue;
      const double in = (static_cast<double>(n[c]) + a) / (static_cast<double>(totals[c]) + av);
      const double out = (static_cast<double>(all - n[c]) + a) /
                         (static_cast<double>(grand - totals[c]) + av);
      w[c] = std::log(in) - std::log(out);
    }
    model.set_weights(token, w);
  }
  return model;
}

LabelSummary classify_corpus(std::span<TweetRecord> corpus, const LexiconModel& model,
                             unsigned workers) {
  LabelSummary summary;
  for (const auto label : kStanceLabels) summary.counts[label] = 0;
  const unsigned n_workers = resolve_workers(workers);
  std::vector<std::array<std::size_t, 4>> per_shard(shard_count(corpus.size(), n_workers));
  parallel_shards(corpus.size(), n_workers, [&](std::size_t s, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto label = model.classify(corpus[i]);
      corpus[i].stance = label;
      ++per_shard[s][static_cast<std::size_t>(label)];
    }
  });
  for (const auto& shard : per_shard) {
    for (const auto label : kStanceLabels) {
      summary.counts[label] += shard[static_cast<std::size_t>(label)];
    }
  }
  summary.total = corpus.size();
  return summary;
}

}  // namespace electrend
