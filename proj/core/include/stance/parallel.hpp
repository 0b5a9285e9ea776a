#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stance {

/// Runs fn(i) for every i in [0, count) on at most `workers` threads.
/// Work is claimed from a shared counter, so completion order is arbitrary;
/// callers write into slot i to keep results positional. The first exception
/// thrown by fn is rethrown after all workers have joined.
template <typename Fn>
void parallel_for_index(std::size_t count, std::size_t workers, Fn&& fn) {
  if (count == 0) return;
  workers = std::clamp<std::size_t>(workers, 1, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stance
