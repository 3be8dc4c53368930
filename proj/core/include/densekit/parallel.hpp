#pragma once

#include <cstddef>
#include <functional>

namespace densekit {

/// Worker count from DENSEKIT_THREADS, falling back to hardware concurrency.
[[nodiscard]] std::size_t default_thread_count();

/// Calls fn(i) for i in [0, n) on up to `threads` workers.
/// Work is split into contiguous chunks; callers write results by index, so
/// output does not depend on the thread count. The first exception thrown by
/// any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace densekit
