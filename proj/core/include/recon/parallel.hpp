#pragma once

#include <cstddef>
#include <functional>

namespace recon {

/// Sets the worker count used by parallel_for. 0 restores the hardware default.
void set_thread_count(int n);

/// Current worker count (>= 1).
int thread_count();

/// Runs fn(begin..end) split into contiguous ranges across workers. The split
/// depends only on (end - begin) and the configured thread count, never on
/// scheduling, so any per-range output written to disjoint memory is identical
/// for every thread count. Falls back to a plain loop for small ranges.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace recon
