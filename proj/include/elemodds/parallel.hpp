#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace elemodds {

/// Run body(i) for i in [0, n) on up to `threads` workers, contiguous
/// chunks per worker. The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::int64_t n, int threads, Body&& body) {
  const std::int64_t workers = std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(n, 1));
  if (workers == 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::int64_t begin = n * w / workers;
        const std::int64_t end = n * (w + 1) / workers;
        try {
          for (std::int64_t i = begin; i < end; ++i) body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Number of i in [0, n) for which pred(i) holds.
template <class Pred>
std::int64_t parallel_count(std::int64_t n, int threads, Pred&& pred) {
  const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(n, 1)));
  std::vector<std::int64_t> counts(static_cast<std::size_t>(workers), 0);
  parallel_for(workers, workers, [&](std::int64_t w) {
    const std::int64_t begin = n * w / workers;
    const std::int64_t end = n * (w + 1) / workers;
    std::int64_t c = 0;
    for (std::int64_t i = begin; i < end; ++i)
      if (pred(i)) ++c;
    counts[static_cast<std::size_t>(w)] = c;
  });
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

}  // namespace elemodds
