#pragma once

#include <cstddef>
#include <functional>

namespace erm {

// Worker count: ERM_ANATOMY_THREADS when set to a positive integer, otherwise
// the hardware concurrency. Results never depend on this value.
unsigned worker_threads();

// Runs body(i) for i in [0, n) on up to `threads` threads (0 = worker_threads()).
// Indices are split into contiguous chunks; the first exception is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace erm
