#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bp {

// Worker count for parallel sections: BIPHOTON_WORKERS env var, else hardware
// concurrency. Results are written into preassigned slots, so assembly is
// deterministic and order-independent.
inline size_t worker_count() {
  if (const char* env = std::getenv("BIPHOTON_WORKERS")) {
    const long v = std::atol(env);
    if (v >= 1) return static_cast<size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

inline void parallel_for_blocks(size_t n, size_t block,
                                const std::function<void(size_t, size_t)>& fn) {
  if (n == 0) return;
  const size_t workers = std::min(worker_count(), (n + block - 1) / block);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex err_mutex;
  auto run = [&] {
    for (;;) {
      const size_t lo = next.fetch_add(block);
      if (lo >= n) return;
      const size_t hi = std::min(lo + block, n);
      try {
        fn(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (size_t i = 1; i < workers; ++i) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  parallel_for_blocks(n, 64, [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) fn(i);
  });
}

}  // namespace bp
