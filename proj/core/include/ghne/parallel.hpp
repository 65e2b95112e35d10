#pragma once

#include <cstddef>
#include <functional>

namespace ghne {

// Worker count: GHNE_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Work items must be independent; results are
// identical to a sequential loop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ghne
