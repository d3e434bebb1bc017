#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "electrend/calendar.hpp"
#include "electrend/tweet.hpp"

namespace electrend {

/// A user's stance counts on one day: n_M (ProMP), n_F (ProFF) and everything
/// else (ProThird + Neutral).
struct DayCounts {
  DayIndex day = 0;
  std::uint32_t mp = 0;
  std::uint32_t ff = 0;
  std::uint32_t other = 0;
  bool operator==(const DayCounts&) const = default;
};

struct StanceSums {
  std::uint64_t mp = 0;
  std::uint64_t ff = 0;
  std::uint64_t other = 0;
  bool operator==(const StanceSums&) const = default;
};

/// Immutable per-user sparse day counters with per-user prefix sums, so any
/// range sum is two binary searches. Users are ordered by id.
class CounterTable {
 public:
  std::size_t user_count() const noexcept { return users_.size(); }
  const std::string& user_id(std::size_t user) const { return users_[user]; }
  std::optional<std::size_t> find_user(std::string_view id) const;

  /// Active days of `user`, ascending.
  std::span<const DayCounts> days(std::size_t user) const {
    return {entries_.data() + offsets_[user], offsets_[user + 1] - offsets_[user]};
  }
  /// Sums over days in [from, to] (inclusive); empty ranges give zeros.
  StanceSums sums(std::size_t user, DayIndex from, DayIndex to) const;

  std::size_t entry_count() const noexcept { return entries_.size(); }
  std::uint64_t record_count() const noexcept { return records_; }
  /// 0 when the table is empty.
  DayIndex first_day() const noexcept { return first_day_; }
  DayIndex last_day() const noexcept { return last_day_; }

 private:
  friend class CounterTableBuilder;

  std::vector<std::string> users_;
  std::vector<std::size_t> offsets_{0};
  std::vector<DayCounts> entries_;
  std::vector<StanceSums> prefix_;  // inclusive running sums within each user
  std::uint64_t records_ = 0;
  DayIndex first_day_ = 0;
  DayIndex last_day_ = 0;
};

/// Mutable accumulator. Adding records and snapshotting again is equivalent to
/// building from scratch; merge() is commutative, so shards may be combined in any order.
class CounterTableBuilder {
 public:
  void add(std::string_view user, DayIndex day, StanceLabel label);
  void add(std::string_view user, const DayCounts& counts);
  /// Requires `day` and `stance`; throws DataError otherwise.
  void add(const TweetRecord& record);
  void merge(const CounterTableBuilder& other);

  std::size_t user_count() const noexcept { return index_.size(); }
  CounterTable snapshot() const;

 private:
  DayCounts& slot(std::string_view user, DayIndex day);

  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> names_;
  std::vector<std::vector<DayCounts>> days_;
};

/// Parallel by shard of the record span.
CounterTable build_counters(std::span<const TweetRecord> records, unsigned workers = 1);

}  // namespace electrend
