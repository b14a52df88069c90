#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "lfgw/types.hpp"

namespace lfgw {

/// Resolve a thread-count request: 0 means hardware concurrency.
inline int resolve_threads(int requested) {
  if (requested < 0) throw InputError("thread count must be >= 0");
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(i) for i in [begin, end) across up to `threads` workers.
/// Work is handed out by an atomic counter; results must be written to
/// disjoint slots so the outcome is independent of scheduling.
/// The first exception thrown by any worker is rethrown on the caller.
template <typename Fn>
void parallel_for(Index begin, Index end, int threads, Fn&& fn) {
  const Index count = end - begin;
  if (count <= 0) return;
  const int workers = std::min<Index>(resolve_threads(threads), count);
  if (workers <= 1) {
    for (Index i = begin; i < end; ++i) fn(i);
    return;
  }

  std::atomic<Index> next(begin);
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    while (true) {
      const Index i = next.fetch_add(1);
      if (i >= end) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lfgw
