#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace electrend {

/// 0 means "all hardware threads".
inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, n) into at most `workers` contiguous shards and runs
/// fn(shard, begin, end) on each. Shard boundaries depend only on n and the
/// shard count, so callers that merge per-shard results in shard order get
/// output independent of scheduling. The first exception thrown is rethrown.
template <typename Fn>
void parallel_shards(std::size_t n, unsigned workers, Fn&& fn) {
  const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
  if (shards == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(shards);
  std::vector<std::thread> threads;
  threads.reserve(shards);
  for (std::size_t s = 0; s < shards; ++s) {
    const std::size_t begin = n * s / shards;
    const std::size_t end = n * (s + 1) / shards;
    threads.emplace_back([&, s, begin, end] {
      try {
        fn(s, begin, end);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::size_t shard_count(std::size_t n, unsigned workers) {
  return std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
}

}  // namespace electrend
