#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gsml {

/// Process-wide worker count used by the batched evaluators (0 = hardware).
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Each index is owned by exactly one worker, so
/// writes into preallocated per-index slots are deterministic. The first
/// exception thrown by any worker is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, unsigned threads = thread_count()) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace gsml
