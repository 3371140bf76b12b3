#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stablescat {

/// Worker count from STABLESCAT_WORKERS, else hardware concurrency. Results never
/// depend on it: work items write to their own slots and reductions run in index order.
inline unsigned worker_count() {
  if (const char* env = std::getenv("STABLESCAT_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return unsigned(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) across worker threads; fn must only write to
/// storage owned by index i. The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace stablescat
