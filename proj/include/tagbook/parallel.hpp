#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tagbook {

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to `threads`
/// workers. Chunks are disjoint, so a body that writes only to its own
/// output slots gives the same result for any thread count. The first
/// exception thrown by a worker is rethrown on the calling thread.
template <typename Body>
void parallel_chunks(std::size_t n, unsigned threads, Body&& body) {
  if (n == 0)
    return;
  const std::size_t workers =
      std::clamp<std::size_t>(threads == 0 ? 1 : threads, 1, n);
  if (workers == 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end)
      break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace tagbook
