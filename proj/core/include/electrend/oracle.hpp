#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "electrend/trend.hpp"
#include "electrend/tweet.hpp"

// Reference evaluation of the user-category rules by literal nested loops over
// dense per-day arrays. Deliberately shares no counting, summation or comparison
// code with CounterTable / trend so each can check the other.
namespace electrend::oracle {

struct DenseUser {
  std::string user_id;
  // index t - 1 holds day t
  std::vector<std::uint32_t> m;
  std::vector<std::uint32_t> f;
  std::vector<std::uint32_t> other;
};

struct DenseCounts {
  DayIndex days = 0;
  std::vector<DenseUser> users;
};

/// Counts labeled records (day and stance required) into dense arrays.
DenseCounts count_records(std::span<const TweetRecord> labeled);

struct Instant {
  int w = 14;
  DayIndex T = 1;
};
struct Cumulative {
  DayIndex T0 = 1;
  DayIndex T = 1;
};
using Mode = std::variant<Instant, Cumulative>;

/// Categorized users only; users falling in no category are absent.
std::map<std::string, UserCategory> categories(const DenseCounts& counts, const Mode& mode);

}  // namespace electrend::oracle
