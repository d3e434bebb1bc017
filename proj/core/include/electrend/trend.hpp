#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "electrend/calendar.hpp"
#include "electrend/counters.hpp"

namespace electrend {

enum class UserCategory { MP, FF, Undecided, Unclassified };
std::string_view to_string(UserCategory category);

/// Trailing window [max(1, T - window + 1), T].
struct WindowConfig {
  int window = 14;
  DayIndex T = 1;
  DayIndex start() const { return std::max<DayIndex>(1, T - window + 1); }
  void validate() const;
};

/// Accumulation range [t0, T].
struct CumulativeConfig {
  DayIndex t0 = 1;
  DayIndex T = 1;
  void validate() const;
};

StanceSums window_sums(const CounterTable& table, std::size_t user, const WindowConfig& cfg);

/// MP if S_M > S_F, FF if S_M < S_F, Undecided if S_M = S_F > 0; nullopt when the
/// user has no M/F tweets in the window (excluded from the denominator).
std::optional<UserCategory> categorize_instant(const CounterTable& table, std::size_t user,
                                               const WindowConfig& cfg);
/// Same comparisons over [t0, T]; a user with other activity but S_M = S_F = 0 is
/// Unclassified, and a user silent in [t0, T] is excluded (nullopt).
std::optional<UserCategory> categorize_cumulative(const CounterTable& table, std::size_t user,
                                                  const CumulativeConfig& cfg);

enum class TrendMode { Instant, Cumulative };
std::string_view to_string(TrendMode mode);

/// Which instantaneous categories enter the denominator. Cumulative points always
/// use all four categories.
enum class InstantDenominator { IncludeUndecided, DecidedOnly };

struct CategoryTally {
  double mp = 0;
  double ff = 0;
  double undecided = 0;
  double unclassified = 0;

  void add(UserCategory category, double weight = 1.0);
  CategoryTally& operator+=(const CategoryTally& other);
  bool operator==(const CategoryTally&) const = default;
};

struct TrendPoint {
  DayIndex day = 0;
  Date date{};
  TrendMode mode = TrendMode::Cumulative;
  InstantDenominator denominator_rule = InstantDenominator::IncludeUndecided;
  CategoryTally counts;
  double denominator = 0;
  /// Empty when the denominator is zero; never reported as 0%.
  std::optional<double> pct_ff;
  std::optional<double> pct_mp;
  std::optional<double> pct_others;
  /// Per-stratum tallies, present when the series was built with strata.
  std::map<std::string, CategoryTally> by_stratum;
  /// Set by apply_demographic_weights: the counts before weighting.
  std::optional<CategoryTally> unweighted;

  bool is_null() const { return !pct_ff.has_value(); }
  /// Recomputes denominator and percentages from `counts`.
  void finalize();
};

struct TrendSeries {
  std::string run_id;
  TrendMode mode = TrendMode::Cumulative;
  int window = 0;    // instant mode
  DayIndex t0 = 0;   // cumulative mode
  std::vector<TrendPoint> points;
};

struct DayRange {
  DayIndex first = 1;
  DayIndex last = 1;
};

/// User -> stratum map resolved against a counter table. Users missing from the
/// map fall into the unknown stratum "".
class StrataAssignment {
 public:
  StrataAssignment(const CounterTable& table, const std::map<std::string, std::string>& strata);
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t stratum_of(std::size_t user) const { return of_user_[user]; }

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> of_user_;
};

struct TrendOptions {
  /// Calendar date of day 1, used to date each point.
  Date origin{};
  const StrataAssignment* strata = nullptr;
  InstantDenominator denominator = InstantDenominator::IncludeUndecided;
  unsigned workers = 1;
  std::string run_id;
};

/// One point per day in `range`. Each user contributes O(active days) work, so a
/// series costs O(entries + users + days) regardless of its length.
TrendSeries trend_instant(const CounterTable& table, int window, DayRange range,
                          const TrendOptions& options = {});
/// Requires range.first >= t0.
TrendSeries trend_cumulative(const CounterTable& table, DayIndex t0, DayRange range,
                             const TrendOptions& options = {});

/// Single-day evaluation through the prefix sums (O(users log days)).
TrendPoint evaluate_instant(const CounterTable& table, const WindowConfig& cfg,
                            const TrendOptions& options = {});
TrendPoint evaluate_cumulative(const CounterTable& table, const CumulativeConfig& cfg,
                               const TrendOptions& options = {});

struct SweepResult {
  DayIndex final_day = 0;
  std::vector<TrendSeries> series;  // one per t0, in the order given
  /// Max pairwise spread of the final-day percentages over non-null points.
  double spread_ff = 0;
  double spread_mp = 0;
};

SweepResult sweep_t0(const CounterTable& table, const std::vector<DayIndex>& t0s,
                     DayIndex final_day, const TrendOptions& options = {});

using StratumWeights = std::map<std::string, double>;

/// Scales each stratum's tally by its weight (unknown stratum "" defaults to 1) and
/// recomputes the percentages. The input point is untouched; the result keeps the
/// unweighted counts. Throws UsageError on a non-positive weight or a stratum with
/// no weight.
TrendPoint apply_demographic_weights(const TrendPoint& point, const StratumWeights& weights);

/// CSV header: stratum,weight
StratumWeights load_weights(const std::filesystem::path& path);
/// CSV header: user_id,stratum
std::map<std::string, std::string> load_strata(const std::filesystem::path& path);

/// date,T,n_mp,n_ff,n_undecided,n_unclassified,pct_ff,pct_mp,pct_others,denominator
void write_trend_csv(std::ostream& out, const TrendSeries& series);
void write_sweep_summary_csv(std::ostream& out, const SweepResult& sweep, Date origin);

}  // namespace electrend
