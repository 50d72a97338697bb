#pragma once

#include <cstddef>
#include <functional>

namespace hoal {

// Worker count used by parallel_for. Defaults to 1; results never depend on it.
void set_num_threads(int n);
int num_threads();

// Calls fn(i) for every i in [0, n). Each index is handled by exactly one worker,
// so any per-index output is independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

}  // namespace hoal
