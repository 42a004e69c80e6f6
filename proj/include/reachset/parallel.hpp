#pragma once

#include <cstddef>
#include <functional>

namespace reachset {

/// Worker count: the explicit override if set (> 0), else REACHSET_THREADS
/// (0 or unset = hardware concurrency).
int worker_count();
void set_worker_count(int n);  // 0 restores the environment / auto default

/// Runs fn(i) for i in [0, n) over contiguous blocks. Each index is
/// processed exactly once; fn must only write to slots owned by i.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace reachset
