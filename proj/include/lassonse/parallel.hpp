#pragma once

#include <cstddef>
#include <functional>

namespace lassonse {

/// Worker count: LASSONSE_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
std::size_t default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Tasks are
/// claimed dynamically; callers must write results into per-index slots.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = default_threads());

}  // namespace lassonse
