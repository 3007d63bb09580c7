// parallel.hpp - ordered fan-out over independent work items.

#pragma once

#include <cstddef>
#include <functional>

namespace bistab {

/// Worker count: `requested` if positive, otherwise BISTAB_THREADS if set
/// to a positive integer, otherwise the hardware concurrency.
int resolve_thread_count(int requested = 0);

/// Calls work(i) for i in [0, n) on `threads` workers. Each index is
/// processed exactly once; results must be written to slot i so the output
/// does not depend on scheduling. The first exception is rethrown after all
/// workers have joined.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& work);

} // namespace bistab
