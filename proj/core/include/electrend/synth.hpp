#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "electrend/calendar.hpp"
#include "electrend/trend.hpp"
#include "electrend/tweet.hpp"

namespace electrend {

struct StanceMix {
  double ff = 0.475;
  double mp = 0.309;
  double third = 0.216;
  /// Components in [0, 1] summing to 1 within 1e-9; throws UsageError otherwise.
  void validate() const;
  bool operator==(const StanceMix&) const = default;
};

/// Synthetic electorate description. The default mix is the 2019 general-election
/// forecast (FF 47.5%, MP 30.9%, third 21.6%).
struct ElectorateSpec {
  std::size_t n_users = 10000;
  int days = 120;
  Date start = Date{std::chrono::year{2019} / std::chrono::March / 1};
  StanceMix mix;
  /// Mean tweets per user per day; per-user rates are gamma distributed.
  double mean_rate = 0.5;
  /// Coefficient of variation of per-user rates (0 = identical rates).
  double heterogeneity = 0.5;
  /// Probability an FF or MP user's tweet is written for the opposing formula.
  double crosstalk = 0.05;
  /// Share of tweets carrying only shared vocabulary.
  double neutral_rate = 0.0;
  double seed_tag_rate = 0.3;
  double camp_tag_rate = 0.5;
  double bot_fraction = 0.005;
  /// Per-day probability that a bot bursts.
  double bot_burst_prob = 0.1;
  int bot_burst_size = 100;
  int bot_burst_minutes = 30;
  /// From the given day on, users' stances follow the new mix.
  std::map<DayIndex, StanceMix> drift;
  std::uint64_t seed = 20190811;

  void validate() const;
  const StanceMix& mix_on(DayIndex day) const;
  /// Stable identifier derived from every field.
  std::string run_id() const;
};

/// "key = value" lines after a "electrend-electorate 1" header; '#' comments.
ElectorateSpec parse_spec(std::istream& in);
ElectorateSpec load_spec(const std::filesystem::path& path);
void write_spec(std::ostream& out, const ElectorateSpec& spec);

struct UserTruth {
  std::string user_id;
  Camp stance = Camp::FF;  // on the final day
  bool is_bot = false;
  double latent = 0;       // position in [0, 1) that maps to a camp under any mix
};

struct GroundTruth {
  std::string run_id;
  ElectorateSpec spec;
  std::vector<UserTruth> users;

  Camp stance_on(const UserTruth& user, DayIndex day) const;
  /// Realized camp shares among non-bot users on `day`.
  StanceMix proportions_on(DayIndex day) const;
};

struct SyntheticElectorate {
  /// Sorted by (created_at, tweet_id); records carry no day or stance.
  std::vector<TweetRecord> corpus;
  /// Intended stance of each corpus record, aligned by index.
  std::vector<StanceLabel> tweet_labels;
  GroundTruth truth;
};

/// Parallel by user with per-user random streams, so output does not depend on `workers`.
SyntheticElectorate generate(const ElectorateSpec& spec, unsigned workers = 1);

/// user_id,stance,is_bot
void write_truth_csv(std::ostream& out, const GroundTruth& truth);

struct RecoveryDay {
  DayIndex day = 0;
  double truth_ff = 0;  // percent
  double truth_mp = 0;
  std::optional<double> error_ff;
  std::optional<double> error_mp;
};

struct RecoveryReport {
  std::vector<RecoveryDay> days;
  std::optional<double> final_error_ff;
  std::optional<double> final_error_mp;
  /// First day from which both errors stay below 1 point through the end.
  std::optional<DayIndex> convergence_day;
  double max_final_error() const;
};

/// Absolute percentage-point errors of pct_ff / pct_mp against the true camp shares.
/// Throws DataError when the series and truth come from different runs.
RecoveryReport recovery_report(const TrendSeries& estimates, const GroundTruth& truth);
void write_recovery_csv(std::ostream& out, const RecoveryReport& report);

}  // namespace electrend
