#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace lrf {

/// Worker cap: min(hardware, LRF_LAB_THREADS if set). At least 1.
std::size_t worker_limit();

/// Runs fn(i) for i in [0, count) across workers. Each index is processed
/// exactly once; work items must not depend on each other, so results are
/// identical for any thread count. Exceptions from fn propagate to the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace lrf
