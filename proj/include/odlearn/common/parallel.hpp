#pragma once

#include <cstddef>
#include <functional>

namespace odlearn {

/// Global cap on worker threads used by parallel_for (default: hardware).
void set_max_threads(int n);
int max_threads();

/// Runs fn(i) for i in [begin, end) across at most max_threads() workers.
/// Work items must write to disjoint state; the result must not depend on
/// the schedule. Exceptions thrown by fn are rethrown on the caller thread.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace odlearn
