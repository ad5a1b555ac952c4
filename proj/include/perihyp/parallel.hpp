#pragma once

#include <cstddef>
#include <functional>

namespace perihyp {

/// Worker count: PERIHYP_THREADS if set and positive, else hardware concurrency.
int thread_count();

/// Runs body(i) for i in [begin, end), split into contiguous chunks over at
/// most thread_count() threads. The body must only write disjoint data.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace perihyp
