#ifndef HJLAB_PAR_HPP
#define HJLAB_PAR_HPP

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hjlab {

// Runs fn(i) for i in [0, n) across hardware threads. Exceptions from workers
// are captured and the first one rethrown after join.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw < 2 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  unsigned workers = hw < n ? hw : static_cast<unsigned>(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr err = nullptr;
  std::once_flag err_once;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::call_once(err_once, [&]() { err = std::current_exception(); });
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace hjlab

#endif
