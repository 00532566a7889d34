#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace reinsure {

// Worker count: hardware concurrency, capped by REINSURE_THREADS when set.
unsigned worker_count();

// Calls fn(i) for i in [0, n) on contiguous blocks across workers. The first
// exception thrown by any worker is rethrown on the caller's thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Pairwise summation in index order; the result does not depend on how the
// terms were produced.
double pairwise_sum(std::span<const double> xs);

}  // namespace reinsure
