#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "electrend/tweet.hpp"

namespace electrend {

/// Hashtag -> camp map. A tag belongs to at most one camp.
class SeedSet {
 public:
  /// Throws UsageError if `tag` is already seeded for a different camp.
  void add(Camp camp, std::string_view tag);
  std::optional<Camp> camp_of(std::string_view tag) const;
  std::size_t size() const noexcept { return tags_.size(); }
  std::size_t count(Camp camp) const;
  const std::map<std::string, Camp>& tags() const noexcept { return tags_; }

  /// Default 2019 campaign seeds: #FuerzaCristina, #Nestorvuelva,
  /// #Nestorpudo and #NuncamasMacri for FF; #Cambiemos and #MM2019 for MP;
  /// #Lavagna for the third camp.
  static SeedSet argentina_2019();
  /// Lines of "<camp>[:] tag [tag ...]" with camp in {FF, MP, Third}; '#' lines are comments.
  static SeedSet load(const std::filesystem::path& path);
  static SeedSet parse(std::istream& in);

 private:
  std::map<std::string, Camp> tags_;
};

/// Seed-hashtag override plus a bag-of-words scorer.
///
/// Token weights are one-vs-rest smoothed log-likelihood ratios
///   w_c(t) = log p(t | c) - log p(t | not c),  p(t | c) = (n_c(t) + a) / (N_c + a V)
/// and a tweet's camp score is the sum of its token weights (unknown tokens add 0).
/// The best camp wins when it beats the runner-up by more than decision_margin;
/// otherwise the tweet is Neutral.
class LexiconModel {
 public:
  using Weights = std::array<double, 3>;  // indexed by Camp

  LexiconModel() = default;
  LexiconModel(SeedSet seeds, std::vector<std::string> kept_handles, double smoothing,
               double decision_margin);

  const SeedSet& seeds() const noexcept { return seeds_; }
  const std::vector<std::string>& kept_handles() const noexcept { return handles_; }
  double smoothing() const noexcept { return smoothing_; }
  double decision_margin() const noexcept { return margin_; }
  void set_decision_margin(double margin) { margin_ = margin; }
  std::size_t vocabulary_size() const noexcept { return weights_.size(); }

  /// Throws UsageError on non-finite weights.
  void set_weights(std::string token, const Weights& w);
  const Weights* weights(std::string_view token) const;

  /// Lowercased word tokens; URLs removed, @mentions removed unless they name a kept handle.
  std::vector<std::string> tokenize(std::string_view text) const;
  Weights scores(std::string_view text) const;
  StanceLabel classify(const TweetRecord& record) const;

  void save(std::ostream& out) const;
  /// Throws DataError on an unknown format or version.
  static LexiconModel load(std::istream& in);

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  SeedSet seeds_;
  std::vector<std::string> handles_;
  double smoothing_ = 1.0;
  double margin_ = 0.0;
  std::unordered_map<std::string, Weights, StringHash, std::equal_to<>> weights_;
};

/// Camps whose seed tags occur in the record's hashtags.
std::vector<Camp> seed_camps(const TweetRecord& record, const SeedSet& seeds);

struct TrainOptions {
  double smoothing = 1.0;
  double decision_margin = 0.0;
  /// Mentions kept as tokens; defaults to the single-term candidate queries.
  std::optional<std::vector<std::string>> kept_handles;
  unsigned workers = 1;
};

struct TrainingStats {
  std::size_t tweets = 0;
  std::array<std::size_t, 3> pseudo_labeled{};  // per Camp
  std::size_t vocabulary = 0;
  double coverage() const;
};

/// Tweets carrying exactly one camp's seed tags become pseudo-labeled training data.
/// Camps absent from the seed set are never predicted. Throws UsageError when the
/// seeds cover fewer than two camps and DataError naming any seeded camp left
/// without pseudo-labeled tweets.
LexiconModel train_from_seeds(std::span<const TweetRecord> corpus, const SeedSet& seeds,
                              const TrainOptions& options = {}, TrainingStats* stats = nullptr);

struct LabelSummary {
  std::map<StanceLabel, std::size_t> counts;
  std::size_t total = 0;
};

/// Sets `stance` on every record.
LabelSummary classify_corpus(std::span<TweetRecord> corpus, const LexiconModel& model,
                             unsigned workers = 1);

}  // namespace electrend
