#include "electrend/oracle.hpp"

#include <map>

#include "electrend/errors.hpp"

namespace electrend::oracle {

DenseCounts count_records(std::span<const TweetRecord> labeled) {
  DenseCounts out;
  for (const auto& r : labeled) {
    if (!r.day || !r.stance) throw DataError("oracle needs records with day and stance");
    if (r.day->t > out.days) out.days = r.day->t;
  }
  std::map<std::string, std::size_t> index;
  for (const auto& r : labeled) {
    auto it = index.find(r.user_id);
    if (it == index.end()) {
      it = index.emplace(r.user_id, out.users.size()).first;
      DenseUser u;
      u.user_id = r.user_id;
      u.m.assign(static_cast<std::size_t>(out.days), 0);
      u.f.assign(static_cast<std::size_t>(out.days), 0);
      u.other.assign(static_cast<std::size_t>(out.days), 0);
      out.users.push_back(std::move(u));
    }
    auto& u = out.users[it->second];
    const auto slot = static_cast<std::size_t>(r.day->t - 1);
    if (*r.stance == StanceLabel::ProMP) {
      u.m[slot] += 1;
    } else if (*r.stance == StanceLabel::ProFF) {
      u.f[slot] += 1;
    } else {
      u.other[slot] += 1;
    }
  }
  return out;
}

std::map<std::string, UserCategory> categories(const DenseCounts& counts, const Mode& mode) {
  std::map<std::string, UserCategory> result;
  const bool instant = std::holds_alternative<Instant>(mode);
  DayIndex from = 1;
  DayIndex to = 1;
  if (instant) {
    const auto& m = std::get<Instant>(mode);
    to = m.T;
    // "if T - w < 0, t starts from 1"
    from = m.T - m.w + 1;
    if (from < 1) from = 1;
  } else {
    const auto& m = std::get<Cumulative>(mode);
    from = m.T0;
    to = m.T;
  }

  for (const auto& user : counts.users) {
    long long sum_m = 0;
    long long sum_f = 0;
    long long sum_other = 0;
    for (DayIndex t = from; t <= to; ++t) {
      if (t > counts.days) break;
      sum_m += user.m[static_cast<std::size_t>(t - 1)];
      sum_f += user.f[static_cast<std::size_t>(t - 1)];
      sum_other += user.other[static_cast<std::size_t>(t - 1)];
    }
    if (sum_m > sum_f) {
      result[user.user_id] = UserCategory::MP;
    } else if (sum_m < sum_f) {
      result[user.user_id] = UserCategory::FF;
    } else if (sum_m == sum_f && sum_f > 0) {
      result[user.user_id] = UserCategory::Undecided;
    } else if (!instant && sum_other > 0) {
      result[user.user_id] = UserCategory::Unclassified;
    }
  }
  return result;
}

}  // namespace electrend::oracle
