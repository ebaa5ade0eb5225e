#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace mot {

/// Thread count for pointwise sweeps: `requested` if nonzero, else the
/// MOT_THREADS environment variable, else the hardware concurrency.
std::size_t resolve_threads(std::size_t requested = 0);

/// Calls fn(begin, end) on contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and threads. If several chunks throw, the exception from
/// the lowest chunk is rethrown.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace mot
