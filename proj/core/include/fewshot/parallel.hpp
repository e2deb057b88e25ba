#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fewshot {

// Runs fn(i) for i in [0, n) on up to `workers` threads. After the first
// failure no new indices start; once all threads join, the exception from
// the lowest failed index is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mu;
  std::size_t error_index = n;
  std::exception_ptr error;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          if (failed.load(std::memory_order_relaxed)) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (i < error_index) {
              error_index = i;
              error = std::current_exception();
            }
            failed.store(true, std::memory_order_relaxed);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace fewshot
