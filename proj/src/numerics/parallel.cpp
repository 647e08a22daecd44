#include "pgjr/numerics/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace pgjr {

namespace {

constexpr std::size_t kMinParallelWork = 1 << 16;

unsigned default_threads() {
  if (const char* env = std::getenv("PGJR_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<unsigned>& configured() {
  static std::atomic<unsigned> n{default_threads()};
  return n;
}

thread_local bool in_worker = false;

}  // namespace

unsigned thread_count() { return configured().load(); }

void set_thread_count(unsigned n) { configured().store(std::max(1u, n)); }

void reset_thread_count() { configured().store(default_threads()); }

void parallel_for(std::size_t n, std::size_t cost_per_item,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (threads <= 1 || in_worker || n * std::max<std::size_t>(cost_per_item, 1) < kMinParallelWork) {
    fn(0, n);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::jthread> workers;
  workers.reserve(threads - 1);
  for (unsigned t = 1; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] {
      in_worker = true;
      fn(begin, end);
    });
  }
  in_worker = true;
  fn(0, std::min(n, chunk));
  in_worker = false;
}

}  // namespace pgjr
