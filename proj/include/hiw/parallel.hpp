#pragma once

#include <cstddef>
#include <functional>

namespace hiw {

/// Worker count: HIW_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Runs fn(chunk) for chunk in [0, n_chunks) on up to thread_count() workers.
/// Callers write into per-chunk slots and merge in chunk order, so results do
/// not depend on the number of workers.
void parallel_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& fn,
                     unsigned threads = 0);

}  // namespace hiw
