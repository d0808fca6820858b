#pragma once

#include <cstddef>
#include <functional>

namespace sdm {

/// Worker count: requested if non-zero, else SDM_THREADS, else hardware concurrency.
unsigned resolve_threads(unsigned requested);

/**
 * @brief Runs body(begin, end) over contiguous chunks of [0, n).
 *
 * Chunks are handed to at most `threads` workers. The first exception thrown by
 * any chunk is rethrown after all workers join.
 */
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace sdm
