#pragma once

#include <cstddef>
#include <functional>

namespace spingain {

/// Thread count from SPINGAIN_THREADS, else the hardware concurrency.
unsigned default_thread_count();

/// Calls fn(i) for i in [0, n) on up to `threads` workers (0 = default).
/// Work items must write to disjoint outputs; the first exception thrown by
/// any item is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace spingain
