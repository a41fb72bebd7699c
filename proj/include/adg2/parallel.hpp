#pragma once

#include <cstddef>
#include <functional>

namespace adg2 {

// Worker count: ADG2_THREADS if set and positive, else hardware concurrency (at least 1).
int thread_count();

// Calls fn(i) for i in [0, n) split into contiguous chunks. Each index is visited exactly once,
// so writes to per-index slots followed by a serial reduction are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace adg2
