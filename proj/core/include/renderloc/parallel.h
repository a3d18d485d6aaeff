#pragma once

#include <cstddef>
#include <functional>

namespace renderloc {

// Worker count from RENDERLOC_THREADS, else hardware concurrency (>= 1).
int DefaultParallelism();

// Runs fn(i) for i in [0, n) on up to `threads` workers. Callers write
// results by index, so output never depends on scheduling. The first
// exception thrown by any task is rethrown after all workers join.
void ParallelFor(std::size_t n, int threads,
                 const std::function<void(std::size_t)>& fn);

}  // namespace renderloc
