#pragma once

#include <cstddef>
#include <functional>

namespace pop {

/// Worker count: the hint when nonzero, else POP_THREADS, else hardware concurrency.
std::size_t resolve_threads(std::size_t hint = 0);

/// Runs task(i) for i in [0, n) on up to `threads` workers. The first exception thrown
/// by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& task);

}  // namespace pop
