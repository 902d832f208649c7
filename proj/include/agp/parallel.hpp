#pragma once

#include <functional>

namespace agp {

/// Thread cap from the AGP_THREADS environment variable (default 1).
int max_threads();

/// Runs fn(i) for i in [0, n), split across up to max_threads() threads.
/// Each index must write only its own output slot; results are then
/// independent of the thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace agp
