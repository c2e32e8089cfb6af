#pragma once

#include <cstddef>
#include <functional>

namespace whittleboot {

/// Worker count: WHITTLEBOOT_THREADS if set, else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on a thread pool. Each index is handled
/// exactly once; callers write results by index, so output order never depends
/// on scheduling. The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace whittleboot
