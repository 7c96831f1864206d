#include "stencil_lab/threads.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace stencil_lab {

unsigned max_threads() {
  if (const char* env = std::getenv("STENCIL_LAB_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

void parallel_for_index(std::size_t n,
                        const std::function<void(std::size_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(n, max_threads()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  // the first exception wins; remaining workers drain and stop
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

} // namespace stencil_lab
