#ifndef LDSIM_PARALLEL_H_
#define LDSIM_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ldsim {

auto default_thread_count() -> unsigned;

// Calls fn(i) for every i in [0, count) on up to `threads` workers. Work is
// handed out by index, so callers that write result i into slot i get output
// independent of the thread count. The first exception thrown is rethrown.
template <typename Fn>
auto parallel_for(int64_t count, unsigned threads, Fn&& fn) -> void {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<int64_t>(count, 1))));
  if (threads == 1) {
    for (auto i = int64_t{0}; i != count; ++i) { fn(i); }
    return;
  }
  auto next = std::atomic<int64_t>{0};
  auto failure = std::exception_ptr{};
  auto failure_mutex = std::mutex{};
  auto worker = [&] {
    while (true) {
      auto i = next.fetch_add(1);
      if (i >= count) { return; }
      try {
        fn(i);
      } catch (...) {
        auto lock = std::lock_guard{failure_mutex};
        if (!failure) { failure = std::current_exception(); }
        next.store(count);
        return;
      }
    }
  };
  auto pool = std::vector<std::thread>{};
  for (auto t = 0u; t != threads; ++t) { pool.emplace_back(worker); }
  for (auto& t : pool) { t.join(); }
  if (failure) { std::rethrow_exception(failure); }
}

}  // namespace ldsim

#endif  // LDSIM_PARALLEL_H_
