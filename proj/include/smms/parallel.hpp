#pragma once

#include <cstddef>
#include <functional>

namespace smms {

// Worker count: SMMS_THREADS when set (>= 1), else hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, count). Each index writes only its own output
// slot, so results do not depend on the schedule. The exception raised by the
// lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace smms
