#pragma once

#include <cstddef>
#include <functional>

namespace pgjr {

/// Worker cap. Defaults to PGJR_THREADS when set, hardware parallelism
/// otherwise.
unsigned thread_count();
void set_thread_count(unsigned n);
/// Back to the PGJR_THREADS / hardware default.
void reset_thread_count();

/// Runs fn over [0, n) split into contiguous ranges, one per worker. Every
/// index is processed by exactly one call, so callers that write disjoint
/// outputs per index get results independent of the thread count. Nested
/// calls and small workloads (n * cost_per_item below a threshold) run inline.
void parallel_for(std::size_t n, std::size_t cost_per_item,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace pgjr
