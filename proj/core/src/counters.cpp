#include "electrend/counters.hpp"

#include <algorithm>
#include <numeric>

#include "electrend/errors.hpp"
#include "electrend/parallel.hpp"

namespace electrend {

std::optional<std::size_t> CounterTable::find_user(std::string_view id) const {
  const auto it = std::lower_bound(users_.begin(), users_.end(), id);
  if (it == users_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - users_.begin());
}

StanceSums CounterTable::sums(std::size_t user, DayIndex from, DayIndex to) const {
  if (from > to) return {};
  const auto begin = entries_.begin() + static_cast<std::ptrdiff_t>(offsets_[user]);
  const auto end = entries_.begin() + static_cast<std::ptrdiff_t>(offsets_[user + 1]);
  const auto by_day = [](const DayCounts& e, DayIndex d) { return e.day < d; };
  // lo: first entry >= from; hi: first entry > to
  const auto lo = std::lower_bound(begin, end, from, by_day);
  const auto hi = std::lower_bound(lo, end, to + 1, by_day);
  if (lo == hi) return {};
  const auto at = [&](auto it) { return prefix_[static_cast<std::size_t>(it - entries_.begin())]; };
  StanceSums s = at(hi - 1);
  if (lo != begin) {
    const StanceSums before = at(lo - 1);
    s.mp -= before.mp;
    s.ff -= before.ff;
    s.other -= before.other;
  }
  return s;
}

DayCounts& CounterTableBuilder::slot(std::string_view user, DayIndex day) {
  if (day < 1) throw DataError("day index must be >= 1");
  auto it = index_.find(std::string(user));
  if (it == index_.end()) {
    it = index_.emplace(std::string(user), names_.size()).first;
    names_.emplace_back(user);
    days_.emplace_back();
  }
  auto& days = days_[it->second];
  if (days.empty() || days.back().day < day) {
    days.push_back(DayCounts{day, 0, 0, 0});
    return days.back();
  }
  const auto pos = std::lower_bound(days.begin(), days.end(), day,
                                    [](const DayCounts& e, DayIndex d) { return e.day < d; });
  if (pos != days.end() && pos->day == day) return *pos;
  return *days.insert(pos, DayCounts{day, 0, 0, 0});
}

void CounterTableBuilder::add(std::string_view user, DayIndex day, StanceLabel label) {
  auto& c = slot(user, day);
  switch (label) {
    case StanceLabel::ProMP: ++c.mp; break;
    case StanceLabel::ProFF: ++c.ff; break;
    case StanceLabel::ProThird:
    case StanceLabel::Neutral: ++c.other; break;
  }
}

void CounterTableBuilder::add(std::string_view user, const DayCounts& counts) {
  auto& c = slot(user, counts.day);
  c.mp += counts.mp;
  c.ff += counts.ff;
  c.other += counts.other;
}

void CounterTableBuilder::add(const TweetRecord& record) {
  if (!record.day || !record.stance) {
    throw DataError("record " + record.tweet_id + " lacks a day or stance label");
  }
  add(record.user_id, record.day->t, *record.stance);
}

void CounterTableBuilder::merge(const CounterTableBuilder& other) {
  for (std::size_t u = 0; u < other.names_.size(); ++u) {
    for (const auto& c : other.days_[u]) add(other.names_[u], c);
  }
}

CounterTable CounterTableBuilder::snapshot() const {
  CounterTable table;
  std::vector<std::size_t> order(names_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return names_[a] < names_[b]; });

  std::size_t total = 0;
  for (const auto& d : days_) total += d.size();
  table.users_.reserve(order.size());
  table.offsets_.reserve(order.size() + 1);
  table.entries_.reserve(total);
  table.prefix_.reserve(total);

  for (const std::size_t u : order) {
    StanceSums running;
    bool any = false;
    for (const auto& c : days_[u]) {
      if (c.mp == 0 && c.ff == 0 && c.other == 0) continue;
      any = true;
      running.mp += c.mp;
      running.ff += c.ff;
      running.other += c.other;
      table.entries_.push_back(c);
      table.prefix_.push_back(running);
      if (table.first_day_ == 0 || c.day < table.first_day_) table.first_day_ = c.day;
      table.last_day_ = std::max(table.last_day_, c.day);
    }
    if (!any) continue;
    table.records_ += running.mp + running.ff + running.other;
    table.users_.push_back(names_[u]);
    table.offsets_.push_back(table.entries_.size());
  }
  return table;
}

CounterTable build_counters(std::span<const TweetRecord> records, unsigned workers) {
  const unsigned n = resolve_workers(workers);
  std::vector<CounterTableBuilder> shards(shard_count(records.size(), n));
  parallel_shards(records.size(), n, [&](std::size_t s, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) shards[s].add(records[i]);
  });
  for (std::size_t s = 1; s < shards.size(); ++s) shards[0].merge(shards[s]);
  return shards.front().snapshot();
}

}  // namespace electrend
