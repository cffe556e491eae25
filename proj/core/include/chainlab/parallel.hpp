#pragma once

#include <cstdint>
#include <functional>

namespace chainlab {

/// Worker count: hardware concurrency, capped by CHAIN_LAB_THREADS when set.
unsigned worker_count();

/// Calls body(begin, end) on contiguous chunks of [first, last) from up to
/// worker_count() threads. Chunks are disjoint, so bodies that write only
/// their own index range need no synchronisation.
void parallel_for(std::int64_t first, std::int64_t last,
                  const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace chainlab
