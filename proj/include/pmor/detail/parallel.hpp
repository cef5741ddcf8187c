#pragma once

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>
#include <vector>

#include "pmor/core/types.hpp"

namespace pmor::detail {

/// Runs fn(begin, end, worker) over contiguous chunks of [0, n). With
/// threads <= 1 everything runs on the calling thread. The first exception
/// thrown by any worker is rethrown after all workers join.
template <class Fn>
void parallel_chunks(Index n, int threads, Fn&& fn) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::max<Index>(n, 1))));
  if (workers == 1) {
    fn(Index{0}, n, 0);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Index chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Index b = std::min(n, w * chunk);
    const Index e = std::min(n, b + chunk);
    pool.emplace_back([&, b, e, w] {
      try {
        fn(b, e, w);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace pmor::detail
