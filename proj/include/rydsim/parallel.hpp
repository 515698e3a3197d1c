#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rydsim {

// Runs fn(i) for every i in [0, n), split into contiguous blocks across
// threads. thread_count <= 0 selects the hardware concurrency. fn must only
// write state owned by index i; under that contract the combined result is
// independent of the schedule and of thread_count. The first exception (by
// lowest worker block) is rethrown after all workers join.
inline void parallel_for(int n, int thread_count,
                         const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (thread_count <= 0) {
    thread_count = static_cast<int>(std::thread::hardware_concurrency());
  }
  if (thread_count < 1) thread_count = 1;
  if (thread_count > n) thread_count = n;

  if (thread_count == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(thread_count);
  const int base = n / thread_count;
  const int extra = n % thread_count;
  int start = 0;
  for (int w = 0; w < thread_count; ++w) {
    const int count = base + (w < extra ? 1 : 0);
    workers.emplace_back([&fn, &errors, w, start, count] {
      try {
        for (int i = start; i < start + count; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
    start += count;
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace rydsim
