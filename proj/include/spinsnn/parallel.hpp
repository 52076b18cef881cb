#pragma once

#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

// Deterministic parallel map: work item i writes only into slot i, every item
// derives its randomness from its own index, and any reduction happens
// afterwards in fixed index order. Results are therefore bit-identical for
// any thread count, including 1.

namespace spinsnn {

// Run fn(i) for i in [0, n) on up to `threads` workers. fn must confine its
// writes to per-index state. The first exception thrown by any worker is
// rethrown on the calling thread.
template <class Fn>
void parallel_for_indexed(std::size_t n, int threads, Fn&& fn) {
  if (threads < 1) throw std::invalid_argument("parallel: thread count must be >= 1");
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        // Contiguous block split: worker w covers [lo, hi).
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace spinsnn
