#pragma once

#include <cstddef>
#include <functional>

namespace zipscan {

/// Number of worker threads used when a caller passes workers <= 0.
int default_workers();

/// Runs fn(i) for i in [0, n) on up to `workers` threads (0 -> default).
/// Tasks are claimed through an atomic counter; callers obtain deterministic
/// results by writing into index-addressed slots. The first exception thrown
/// by any task is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace zipscan
