#pragma once

#include <cstddef>
#include <functional>

namespace mrlop {

// Worker count for objective evaluation: MRLOP_THREADS when set to a positive
// integer, hardware concurrency otherwise, always at least 1.
int evaluator_threads();

// Runs fn(0..n-1), spreading indices over evaluator_threads() workers when
// parallel is true. fn must only write to slots addressed by its own index;
// results are then independent of scheduling, so thread count never changes
// output.
void parallel_for(std::size_t n, bool parallel, const std::function<void(std::size_t)>& fn);

}  // namespace mrlop
