#include "electrend/trend.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "electrend/errors.hpp"
#include "electrend/io.hpp"
#include "electrend/parallel.hpp"

namespace electrend {
namespace {

constexpr std::size_t kCategories = 4;
constexpr int kNone = -1;

int category_code(const std::optional<UserCategory>& c) {
  return c ? static_cast<int>(*c) : kNone;
}

std::optional<UserCategory> decide(const StanceSums& s, bool cumulative) {
  if (s.mp > s.ff) return UserCategory::MP;
  if (s.mp < s.ff) return UserCategory::FF;
  if (s.mp > 0) return UserCategory::Undecided;
  if (cumulative && s.other > 0) return UserCategory::Unclassified;
  return std::nullopt;
}

std::string format_count(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) return fmt::format("{:.0f}", v);
  return fmt::format("{:.6f}", v);
}

std::string format_pct(const std::optional<double>& v) {
  return v ? fmt::format("{:.4f}", *v) : std::string();
}

struct StrataView {
  const StrataAssignment* strata;
  std::size_t count() const { return strata ? strata->names().size() : 1; }
  std::size_t of(std::size_t user) const { return strata ? strata->stratum_of(user) : 0; }
};

// Accumulates per-day category deltas for a contiguous shard of users.
class DeltaGrid {
 public:
  DeltaGrid(std::size_t days, std::size_t strata)
      : strata_(strata), cells_(days * strata * kCategories, 0) {}

  void move(std::size_t day_offset, std::size_t stratum, int from, int to) {
    const std::size_t base = (day_offset * strata_ + stratum) * kCategories;
    if (from != kNone) --cells_[base + static_cast<std::size_t>(from)];
    if (to != kNone) ++cells_[base + static_cast<std::size_t>(to)];
  }
  void absorb(const DeltaGrid& other) {
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
  }
  std::int64_t at(std::size_t day_offset, std::size_t stratum, std::size_t cat) const {
    return cells_[(day_offset * strata_ + stratum) * kCategories + cat];
  }

 private:
  std::size_t strata_;
  std::vector<std::int64_t> cells_;
};

CategoryTally tally_from(const std::array<std::int64_t, kCategories>& n) {
  return CategoryTally{static_cast<double>(n[0]), static_cast<double>(n[1]),
                       static_cast<double>(n[2]), static_cast<double>(n[3])};
}

template <typename PerUser>
TrendSeries build_series(const CounterTable& table, DayRange range, const TrendOptions& options,
                         TrendMode mode, PerUser&& per_user) {
  TrendSeries series;
  series.run_id = options.run_id;
  series.mode = mode;
  if (range.last < range.first) return series;
  const std::size_t days = static_cast<std::size_t>(range.last - range.first + 1);
  const StrataView strata{options.strata};
  const unsigned workers = resolve_workers(options.workers);
  const std::size_t n_users = table.user_count();

  std::vector<DeltaGrid> grids(shard_count(n_users, workers), DeltaGrid(days, strata.count()));
  parallel_shards(n_users, workers, [&](std::size_t s, std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      const std::size_t stratum = strata.of(u);
      per_user(u, [&](DayIndex effective, int from, int to) {
        grids[s].move(static_cast<std::size_t>(effective - range.first), stratum, from, to);
      });
    }
  });
  for (std::size_t s = 1; s < grids.size(); ++s) grids[0].absorb(grids[s]);

  std::vector<std::array<std::int64_t, kCategories>> running(strata.count(), {0, 0, 0, 0});
  series.points.reserve(days);
  for (std::size_t d = 0; d < days; ++d) {
    TrendPoint p;
    p.day = range.first + static_cast<DayIndex>(d);
    p.date = date_of_day(options.origin, p.day);
    p.mode = mode;
    p.denominator_rule = options.denominator;
    for (std::size_t s = 0; s < strata.count(); ++s) {
      for (std::size_t c = 0; c < kCategories; ++c) running[s][c] += grids[0].at(d, s, c);
      const CategoryTally t = tally_from(running[s]);
      p.counts += t;
      if (options.strata) p.by_stratum[options.strata->names()[s]] = t;
    }
    p.finalize();
    series.points.push_back(std::move(p));
  }
  return series;
}

template <typename Categorize>
TrendPoint evaluate_point(const CounterTable& table, DayIndex day, TrendMode mode,
                          const TrendOptions& options, Categorize&& categorize) {
  const StrataView strata{options.strata};
  const unsigned workers = resolve_workers(options.workers);
  const std::size_t n_users = table.user_count();
  using Tallies = std::vector<std::array<std::int64_t, kCategories>>;
  std::vector<Tallies> shards(shard_count(n_users, workers),
                              Tallies(strata.count(), {0, 0, 0, 0}));
  parallel_shards(n_users, workers, [&](std::size_t s, std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      if (const auto c = categorize(u)) ++shards[s][strata.of(u)][static_cast<std::size_t>(*c)];
    }
  });
  TrendPoint p;
  p.day = day;
  p.date = date_of_day(options.origin, day);
  p.mode = mode;
  p.denominator_rule = options.denominator;
  for (std::size_t st = 0; st < strata.count(); ++st) {
    std::array<std::int64_t, kCategories> n{0, 0, 0, 0};
    for (const auto& shard : shards) {
      for (std::size_t c = 0; c < kCategories; ++c) n[c] += shard[st][c];
    }
    const CategoryTally t = tally_from(n);
    p.counts += t;
    if (options.strata) p.by_stratum[options.strata->names()[st]] = t;
  }
  p.finalize();
  return p;
}

}  // namespace

std::string_view to_string(UserCategory category) {
  switch (category) {
    case UserCategory::MP: return "MP";
    case UserCategory::FF: return "FF";
    case UserCategory::Undecided: return "Undecided";
    case UserCategory::Unclassified: return "Unclassified";
  }
  return "?";
}

std::string_view to_string(TrendMode mode) {
  return mode == TrendMode::Instant ? "instant" : "cumulative";
}

void WindowConfig::validate() const {
  if (window < 1) throw UsageError("window must be >= 1");
  if (T < 1) throw UsageError("evaluation day must be >= 1");
}

void CumulativeConfig::validate() const {
  if (t0 < 1 || t0 > T) throw UsageError("cumulative range requires 1 <= t0 <= T");
}

StanceSums window_sums(const CounterTable& table, std::size_t user, const WindowConfig& cfg) {
  cfg.validate();
  return table.sums(user, cfg.start(), cfg.T);
}

std::optional<UserCategory> categorize_instant(const CounterTable& table, std::size_t user,
                                               const WindowConfig& cfg) {
  return decide(window_sums(table, user, cfg), false);
}

std::optional<UserCategory> categorize_cumulative(const CounterTable& table, std::size_t user,
                                                  const CumulativeConfig& cfg) {
  cfg.validate();
  return decide(table.sums(user, cfg.t0, cfg.T), true);
}

void CategoryTally::add(UserCategory category, double weight) {
  switch (category) {
    case UserCategory::MP: mp += weight; break;
    case UserCategory::FF: ff += weight; break;
    case UserCategory::Undecided: undecided += weight; break;
    case UserCategory::Unclassified: unclassified += weight; break;
  }
}

CategoryTally& CategoryTally::operator+=(const CategoryTally& other) {
  mp += other.mp;
  ff += other.ff;
  undecided += other.undecided;
  unclassified += other.unclassified;
  return *this;
}

void TrendPoint::finalize() {
  double others = counts.undecided + counts.unclassified;
  if (mode == TrendMode::Instant && denominator_rule == InstantDenominator::DecidedOnly) {
    others = 0;
  }
  denominator = counts.mp + counts.ff + others;
  if (denominator > 0) {
    pct_ff = 100.0 * counts.ff / denominator;
    pct_mp = 100.0 * counts.mp / denominator;
    pct_others = 100.0 * others / denominator;
  } else {
    pct_ff.reset();
    pct_mp.reset();
    pct_others.reset();
  }
}

StrataAssignment::StrataAssignment(const CounterTable& table,
                                   const std::map<std::string, std::string>& strata) {
  names_.push_back("");
  for (const auto& [user, stratum] : strata) {
    if (std::find(names_.begin(), names_.end(), stratum) == names_.end()) names_.push_back(stratum);
  }
  std::sort(names_.begin() + 1, names_.end());
  of_user_.resize(table.user_count(), 0);
  for (std::size_t u = 0; u < table.user_count(); ++u) {
    const auto it = strata.find(table.user_id(u));
    if (it == strata.end()) continue;
    of_user_[u] = static_cast<std::size_t>(
        std::lower_bound(names_.begin() + 1, names_.end(), it->second) - names_.begin());
  }
}

TrendSeries trend_instant(const CounterTable& table, int window, DayRange range,
                          const TrendOptions& options) {
  WindowConfig{window, std::max<DayIndex>(range.first, 1)}.validate();
  if (range.first < 1) throw UsageError("day range must start at day >= 1");
  auto series = build_series(
      table, range, options, TrendMode::Instant, [&](std::size_t u, auto&& emit) {
        const auto days = table.days(u);
        const DayIndex earliest = range.first - window + 1;
        auto it = std::lower_bound(days.begin(), days.end(), earliest,
                                   [](const DayCounts& e, DayIndex d) { return e.day < d; });
        const std::size_t lo = static_cast<std::size_t>(it - days.begin());
        std::size_t add = lo;
        std::size_t drop = lo;
        StanceSums s;
        int current = kNone;
        constexpr DayIndex kNever = std::numeric_limits<DayIndex>::max();
        while (true) {
          const DayIndex next_add = add < days.size() ? days[add].day : kNever;
          const DayIndex next_drop = drop < add ? days[drop].day + window : kNever;
          const DayIndex d = std::min(next_add, next_drop);
          if (d == kNever || d > range.last) break;
          while (add < days.size() && days[add].day == d) {
            s.mp += days[add].mp;
            s.ff += days[add].ff;
            s.other += days[add].other;
            ++add;
          }
          while (drop < add && days[drop].day + window == d) {
            s.mp -= days[drop].mp;
            s.ff -= days[drop].ff;
            s.other -= days[drop].other;
            ++drop;
          }
          const int next = category_code(decide(s, false));
          if (next != current) {
            emit(std::max(d, range.first), current, next);
            current = next;
          }
        }
      });
  series.window = window;
  return series;
}

TrendSeries trend_cumulative(const CounterTable& table, DayIndex t0, DayRange range,
                             const TrendOptions& options) {
  CumulativeConfig{t0, std::max(t0, range.first)}.validate();
  if (range.first < t0) throw UsageError("cumulative series cannot start before t0");
  auto series = build_series(
      table, range, options, TrendMode::Cumulative, [&](std::size_t u, auto&& emit) {
        const auto days = table.days(u);
        auto it = std::lower_bound(days.begin(), days.end(), t0,
                                   [](const DayCounts& e, DayIndex d) { return e.day < d; });
        StanceSums s;
        int current = kNone;
        for (; it != days.end() && it->day <= range.last; ++it) {
          s.mp += it->mp;
          s.ff += it->ff;
          s.other += it->other;
          const int next = category_code(decide(s, true));
          if (next != current) {
            emit(std::max(it->day, range.first), current, next);
            current = next;
          }
        }
      });
  series.t0 = t0;
  return series;
}

TrendPoint evaluate_instant(const CounterTable& table, const WindowConfig& cfg,
                            const TrendOptions& options) {
  cfg.validate();
  return evaluate_point(table, cfg.T, TrendMode::Instant, options,
                        [&](std::size_t u) { return categorize_instant(table, u, cfg); });
}

TrendPoint evaluate_cumulative(const CounterTable& table, const CumulativeConfig& cfg,
                               const TrendOptions& options) {
  cfg.validate();
  return evaluate_point(table, cfg.T, TrendMode::Cumulative, options,
                        [&](std::size_t u) { return categorize_cumulative(table, u, cfg); });
}

SweepResult sweep_t0(const CounterTable& table, const std::vector<DayIndex>& t0s,
                     DayIndex final_day, const TrendOptions& options) {
  if (t0s.empty()) throw UsageError("t0 sweep needs at least one origin");
  SweepResult result;
  result.final_day = final_day;
  double lo_ff = std::numeric_limits<double>::infinity(), hi_ff = -lo_ff;
  double lo_mp = lo_ff, hi_mp = -lo_ff;
  for (const DayIndex t0 : t0s) {
    if (t0 < 1 || t0 > final_day) {
      throw UsageError(fmt::format("t0 day {} outside [1, {}]", t0, final_day));
    }
    auto series = trend_cumulative(table, t0, {t0, final_day}, options);
    const auto& last = series.points.back();
    if (!last.is_null()) {
      lo_ff = std::min(lo_ff, *last.pct_ff);
      hi_ff = std::max(hi_ff, *last.pct_ff);
      lo_mp = std::min(lo_mp, *last.pct_mp);
      hi_mp = std::max(hi_mp, *last.pct_mp);
    }
    result.series.push_back(std::move(series));
  }
  if (hi_ff >= lo_ff) {
    result.spread_ff = hi_ff - lo_ff;
    result.spread_mp = hi_mp - lo_mp;
  }
  return result;
}

TrendPoint apply_demographic_weights(const TrendPoint& point, const StratumWeights& weights) {
  for (const auto& [stratum, w] : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw UsageError(fmt::format("weight for stratum '{}' must be positive, got {}", stratum, w));
    }
  }
  TrendPoint out = point;
  const CategoryTally raw = point.unweighted.value_or(point.counts);
  std::map<std::string, CategoryTally> strata = point.by_stratum;
  if (strata.empty()) strata[""] = raw;

  CategoryTally weighted;
  for (const auto& [stratum, tally] : strata) {
    double w = 1.0;
    if (const auto it = weights.find(stratum); it != weights.end()) {
      w = it->second;
    } else if (!stratum.empty()) {
      throw UsageError("no weight given for stratum '" + stratum + "'");
    }
    weighted.mp += w * tally.mp;
    weighted.ff += w * tally.ff;
    weighted.undecided += w * tally.undecided;
    weighted.unclassified += w * tally.unclassified;
  }
  out.counts = weighted;
  out.unweighted = raw;
  out.finalize();
  return out;
}

StratumWeights load_weights(const std::filesystem::path& path) {
  StratumWeights weights;
  io::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    const auto f = io::split_csv_line(line);
    if (line_no == 1 && !f.empty() && f[0] == "stratum") return;
    if (f.size() != 2) throw UsageError(fmt::format("{}:{}: expected stratum,weight", path.string(), line_no));
    char* end = nullptr;
    const double w = std::strtod(f[1].c_str(), &end);
    if (end == f[1].c_str() || *end != '\0') {
      throw UsageError(fmt::format("{}:{}: bad weight '{}'", path.string(), line_no, f[1]));
    }
    if (!(w > 0.0)) {
      throw UsageError(fmt::format("{}:{}: weight must be positive", path.string(), line_no));
    }
    weights[f[0]] = w;
  });
  return weights;
}

std::map<std::string, std::string> load_strata(const std::filesystem::path& path) {
  std::map<std::string, std::string> strata;
  io::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    const auto f = io::split_csv_line(line);
    if (line_no == 1 && !f.empty() && f[0] == "user_id") return;
    if (f.size() != 2) throw UsageError(fmt::format("{}:{}: expected user_id,stratum", path.string(), line_no));
    strata[f[0]] = f[1];
  });
  return strata;
}

void write_trend_csv(std::ostream& out, const TrendSeries& series) {
  out << "date,T,n_mp,n_ff,n_undecided,n_unclassified,pct_ff,pct_mp,pct_others,denominator\n";
  for (const auto& p : series.points) {
    out << format_date(p.date) << ',' << p.day << ',' << format_count(p.counts.mp) << ','
        << format_count(p.counts.ff) << ',' << format_count(p.counts.undecided) << ','
        << format_count(p.counts.unclassified) << ',' << format_pct(p.pct_ff) << ','
        << format_pct(p.pct_mp) << ',' << format_pct(p.pct_others) << ','
        << format_count(p.denominator) << '\n';
  }
}

void write_sweep_summary_csv(std::ostream& out, const SweepResult& sweep, Date origin) {
  out << "t0_date,t0,final_date,final_T,n_mp,n_ff,n_undecided,n_unclassified,pct_ff,pct_mp,"
         "pct_others,denominator,spread_ff,spread_mp\n";
  for (const auto& s : sweep.series) {
    const auto& p = s.points.back();
    out << format_date(date_of_day(origin, s.t0)) << ',' << s.t0 << ',' << format_date(p.date)
        << ',' << p.day << ',' << format_count(p.counts.mp) << ',' << format_count(p.counts.ff)
        << ',' << format_count(p.counts.undecided) << ',' << format_count(p.counts.unclassified)
        << ',' << format_pct(p.pct_ff) << ',' << format_pct(p.pct_mp) << ','
        << format_pct(p.pct_others) << ',' << format_count(p.denominator) << ','
        << fmt::format("{:.4f},{:.4f}", sweep.spread_ff, sweep.spread_mp) << '\n';
  }
}

}  // namespace electrend
