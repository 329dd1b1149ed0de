#pragma once

/// @file parallel.hpp
/// Minimal static-partition parallel loop. Every index is handled by exactly
/// one worker and workers only write to their own outputs, so results do not
/// depend on the thread count.

#include <cstddef>
#include <functional>

namespace spatspec {

/// Caps worker parallelism. 0 restores the default: SPATSPEC_THREADS if set,
/// otherwise std::thread::hardware_concurrency().
void set_thread_count(int n);
int thread_count();

/// Calls fn(i) for i in [0, n). Exceptions thrown by fn are rethrown (the
/// one from the lowest failing chunk).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace spatspec
