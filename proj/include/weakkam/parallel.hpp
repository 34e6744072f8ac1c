#pragma once

#include <cstddef>
#include <functional>

namespace weakkam {

/// Worker count used by the parallel kernels. Defaults to WEAKKAM_THREADS
/// when set, otherwise 1.
unsigned thread_count();
void set_thread_count(unsigned threads);

/// Runs fn(begin, end) over contiguous, statically assigned chunks of
/// [0, count). Chunk boundaries depend only on count and the worker count,
/// and each index is visited exactly once.
/// Runs serially when count < min_grain.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_grain = 1);

}  // namespace weakkam
